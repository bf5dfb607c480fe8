#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "courtcast/gradcheck.hpp"
#include "courtcast/graph.hpp"
#include "courtcast/model.hpp"
#include "courtcast/optim.hpp"
#include "courtcast/rng.hpp"
#include "courtcast/tape.hpp"

using namespace courtcast;

namespace {

graph::Game two_team_game(int id, const std::vector<int>& team_a, const std::vector<int>& team_b,
                          double minutes = 30.0) {
    graph::Game game;
    game.game_id = id;
    for (int p : team_a) game.team_a.emplace_back(p, minutes);
    for (int p : team_b) game.team_b.emplace_back(p, minutes);
    return game;
}

Tensor random_features(Rng& rng, int n, int cols, double scale = 0.5) {
    Tensor t({n, cols});
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < cols; ++c) t(i, c) = scale * rng.normal() + 0.1;
    return t;
}

// Attention over a fixed bipartite query->key edge list with one scoring
// head; returns the final fitted MSE of predicting [1, 0] from key values
// [1, 0] — query 0 must prefer key 2 and query 1 must prefer key 3.
double fit_crossed_preferences(bool dynamic_scores) {
    model::ModelConfig config;
    config.in_features = 4;
    config.gat_out = 8;
    config.heads = 1;
    config.window = 2;
    config.tcn_out = 4;
    config.tcn_kernel = 2;

    graph::DirectedEdges edges;
    edges.source = {2, 3, 2, 3};
    edges.target = {0, 0, 1, 1};
    edges.node_count = 4;
    const std::vector<int> segments = {0, 0, 1, 1};

    Tensor g_value({4, config.context_dim()});  // one-hot node encodings
    for (int i = 0; i < 4; ++i) g_value(i, i) = 1.0;
    const Tensor key_values = Tensor::of({4, 1}, {0.0, 0.0, 1.0, 0.0});
    const Tensor target = Tensor::of({2, 1}, {1.0, 0.0});

    model::ModelParams params = model::init_params(config, model::Arch::gat_tcn, 12);
    ad::AdamConfig adam;
    adam.lr = 0.05;

    double loss_value = 0.0;
    for (int step = 0; step < 800; ++step) {
        ad::Tape tape;
        const model::BoundParams bound = model::bind(tape, params);
        const ad::Var g = tape.leaf(g_value);
        const ad::Var scores = dynamic_scores
                                   ? model::gatv2_scores(tape, g, edges, bound, 0, config)
                                   : model::gat_v1_scores(tape, g, edges, bound, 0, config);
        const ad::Var alpha = tape.segment_softmax(scores, segments, 2);
        const ad::Var per_edge = tape.gather_rows(tape.leaf(key_values), edges.source);
        const ad::Var mixed = tape.segment_weighted_sum(alpha, per_edge, segments, 2);
        const ad::Var loss = tape.mse(mixed, target);
        loss_value = tape.value(loss).at(0);
        tape.backward(loss);
        params.zero_grads();
        model::accumulate_grads(tape, bound, params);
        ad::adam_step(params.params, adam);
    }
    return loss_value;
}

}  // namespace

TEST_CASE("configuration arithmetic and validation") {
    model::ModelConfig config;
    CHECK(config.context_dim() == 17);
    CHECK(config.head_dim() == 8);
    CHECK(config.conv_steps() == 8);
    CHECK(config.flat_dim() == 512);
    config.validate();

    model::ModelConfig bad = config;
    bad.gat_out = 30;  // not divisible by 4 heads
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.tcn_kernel = 11;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.leaky_slope = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.dropout = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.heads = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    CHECK(model::arch_name(model::Arch::gat_tcn) == "gat_tcn");
    CHECK(model::arch_from_name("per_node_tcn") == model::Arch::per_node_tcn);
    CHECK_THROWS_AS(model::arch_from_name("mlp"), ConfigError);
}

TEST_CASE("init_params is seed-deterministic with a fixed layout") {
    model::ModelConfig config;
    const auto a = model::init_params(config, model::Arch::gat_tcn, 7);
    const auto b = model::init_params(config, model::Arch::gat_tcn, 7);
    REQUIRE(a.params.size() == b.params.size());
    CHECK(a.params.size() == 2 + 4 * 3 + 3);  // embeddings, 4 heads, tcn/out/bias
    for (size_t i = 0; i < a.params.size(); ++i) {
        CHECK(a.params[i].name == b.params[i].name);
        CHECK((a.params[i].value.array() == b.params[i].value.array()).all());
    }
    const auto c = model::init_params(config, model::Arch::gat_tcn, 8);
    CHECK_FALSE((a.params[0].value.array() == c.params[0].value.array()).all());

    CHECK(a.find("head3.a").value.dim(0) == 8);
    CHECK_THROWS_AS(a.find("head4.a"), Error);
    // The bias starts at zero.
    CHECK((a.find("out.b").value.array() == 0.0).all());

    const auto tcn = model::init_params(config, model::Arch::per_node_tcn, 7);
    CHECK(tcn.find("base.w").value.dim(1) == 32);
    CHECK_THROWS_AS(tcn.find("head0.w_l"), Error);
}

TEST_CASE("concat_context appends team and position embeddings") {
    model::ModelConfig config;
    config.in_features = 3;
    config.team_count = 2;
    config.position_count = 5;
    const auto params = model::init_params(config, model::Arch::gat_tcn, 4);
    ad::Tape tape;
    const auto bound = model::bind(tape, params);
    const Tensor features = Tensor::of({2, 3}, {1, 2, 3, 4, 5, 6});
    const ad::Var g = model::concat_context(tape, tape.leaf(features), {1, 0}, {2, 4}, bound,
                                            config);
    const Tensor& value = tape.value(g);
    REQUIRE(value.dim(0) == 2);
    REQUIRE(value.dim(1) == 7);
    CHECK(value(0, 0) == 1.0);
    CHECK(value(1, 2) == 6.0);
    const Tensor& team = params.find("emb.team").value;
    const Tensor& pos = params.find("emb.pos").value;
    CHECK(value(0, 3) == team(1, 0));
    CHECK(value(0, 4) == team(1, 1));
    CHECK(value(1, 3) == team(0, 0));
    CHECK(value(0, 5) == pos(2, 0));
    CHECK(value(1, 6) == pos(4, 1));

    CHECK_THROWS_AS(model::concat_context(tape, tape.leaf(features), {1}, {2, 4}, bound, config),
                    ShapeError);
    CHECK_THROWS_AS(
        model::concat_context(tape, tape.leaf(Tensor({2, 9})), {1, 0}, {2, 4}, bound, config),
        ShapeError);
}

TEST_CASE("zeroed attention vector makes uniform attention and symmetric outputs") {
    // One game putting three players in a K3, identical features everywhere.
    model::ModelConfig config;
    config.in_features = 5;
    config.heads = 1;
    config.gat_out = 8;
    config.team_count = 2;
    auto params = model::init_params(config, model::Arch::gat_tcn, 5);
    params.find("head0.a").value.array() = 0.0;

    const auto snapshot = graph::build_snapshot({two_team_game(1, {0, 1}, {2})});
    const auto edges = graph::directed_edges(snapshot, 3);

    Tensor features({3, 5});
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 5; ++c) features(i, c) = 0.3 * c - 0.1;
    const std::vector<int> team_ids = {0, 0, 1};
    const std::vector<int> pos_ids = {2, 2, 2};  // identical so rows stay interchangeable

    ad::Tape tape;
    const auto bound = model::bind(tape, params);
    const ad::Var g = model::concat_context(tape, tape.leaf(features), team_ids, pos_ids, bound,
                                            config);

    // a = 0 forces every score to zero, v1 and v2 alike.
    const Tensor v2_scores = tape.value(model::gatv2_scores(tape, g, edges, bound, 0, config));
    const Tensor v1_scores = tape.value(model::gat_v1_scores(tape, g, edges, bound, 0, config));
    CHECK((v2_scores.array() == 0.0).all());
    CHECK((v1_scores.array() == 0.0).all());

    // Identical team embeddings are required for full row symmetry.
    params.find("emb.team").value =
        Tensor::of({2, 2}, {0.4, -0.2, 0.4, -0.2});
    ad::Tape tape2;
    const auto bound2 = model::bind(tape2, params);
    const ad::Var g2 = model::concat_context(tape2, tape2.leaf(features), team_ids, pos_ids,
                                             bound2, config);
    Rng rng(0);
    const Tensor out =
        tape2.value(model::gatv2_layer(tape2, g2, edges, bound2, config, false, rng));
    REQUIRE(out.dim(0) == 3);
    for (int i = 1; i < 3; ++i)
        for (int c = 0; c < out.dim(1); ++c)
            CHECK(out(i, c) == doctest::Approx(out(0, c)).epsilon(1e-14));
}

TEST_CASE("attention rows are normalized, isolated nodes keep their self-loop") {
    model::ModelConfig config;
    config.heads = 1;
    config.gat_out = 8;
    config.team_count = 3;
    const auto params = model::init_params(config, model::Arch::gat_tcn, 9);

    // Clique over {0,1,2,3}; node 4 idles.
    const auto snapshot = graph::build_snapshot({two_team_game(1, {0, 1}, {2, 3})});
    const auto edges = graph::directed_edges(snapshot, 5);
    Rng rng(3);
    const Tensor features = random_features(rng, 5, config.in_features);
    const std::vector<int> team_ids = {0, 0, 1, 1, 2};
    const std::vector<int> pos_ids = {0, 1, 2, 3, 4};

    const Eigen::MatrixXd attn =
        model::attention_matrix(features, edges, team_ids, pos_ids, params, config);
    REQUIRE(attn.rows() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(attn.row(i).sum() - 1.0) < 1e-12);  // one head: exact softmax rows
        CHECK(attn(i, i) > 0.0);
    }
    CHECK(attn(4, 4) == 1.0);  // isolated: all attention on itself
    CHECK(attn(0, 4) == 0.0);  // no edge, no weight
    CHECK(attn.minCoeff() >= 0.0);

    // With several heads each cell keeps the strongest head, so rows sum to
    // at least one while staying inside [0,1] cellwise.
    model::ModelConfig multi = config;
    multi.heads = 4;
    multi.gat_out = 32;
    const auto params4 = model::init_params(multi, model::Arch::gat_tcn, 9);
    const Eigen::MatrixXd attn4 =
        model::attention_matrix(features, edges, team_ids, pos_ids, params4, multi);
    for (int i = 0; i < 5; ++i) {
        CHECK(attn4.row(i).sum() >= 1.0 - 1e-12);
        CHECK(attn4.row(i).maxCoeff() <= 1.0);
    }
}

TEST_CASE("graph attention scores stay finite under huge feature magnitudes") {
    model::ModelConfig config;
    config.heads = 2;
    config.gat_out = 8;
    const auto params = model::init_params(config, model::Arch::gat_tcn, 2);
    const auto snapshot = graph::build_snapshot({two_team_game(1, {0, 1}, {2, 3})});
    const auto edges = graph::directed_edges(snapshot, 4);
    Tensor features({4, config.in_features});
    for (int i = 0; i < 4; ++i)
        for (int c = 0; c < config.in_features; ++c) features(i, c) = 1e6 * (i + 1);
    const std::vector<int> team_ids = {0, 0, 1, 1};
    const std::vector<int> pos_ids = {0, 1, 2, 3};

    ad::Tape tape;
    const auto bound = model::bind(tape, params);
    const ad::Var g =
        model::concat_context(tape, tape.leaf(features), team_ids, pos_ids, bound, config);
    Rng rng(0);
    const Tensor out = tape.value(model::gatv2_layer(tape, g, edges, bound, config, false, rng));
    CHECK(out.all_finite());
}

TEST_CASE("forward_window output shape and day-count validation") {
    model::ModelConfig config;
    config.window = 10;
    config.tcn_kernel = 3;
    config.tcn_out = 64;
    config.team_count = 2;
    const auto params = model::init_params(config, model::Arch::gat_tcn, 6);
    const auto snapshot = graph::build_snapshot({two_team_game(1, {0, 1}, {2, 3})});
    const auto edges = graph::directed_edges(snapshot, 4);

    Rng rng(17);
    std::vector<Tensor> days;
    std::vector<const graph::DirectedEdges*> day_edges;
    for (int t = 0; t < 10; ++t) {
        days.push_back(random_features(rng, 4, config.in_features));
        day_edges.push_back(&edges);
    }
    const std::vector<int> team_ids = {0, 0, 1, 1};
    const std::vector<int> pos_ids = {0, 1, 2, 3};

    ad::Tape tape;
    const auto bound = model::bind(tape, params);
    Rng drop(0);
    const ad::Var out = model::forward_window(tape, days, day_edges, team_ids, pos_ids, bound,
                                              config, model::Arch::gat_tcn, false, drop);
    CHECK(tape.value(out).dim(0) == 4);
    CHECK(tape.value(out).dim(1) == 6);
    CHECK(tape.value(out).all_finite());

    std::vector<Tensor> short_days(days.begin(), days.begin() + 9);
    std::vector<const graph::DirectedEdges*> short_edges(day_edges.begin(), day_edges.end() - 1);
    CHECK_THROWS_AS(model::forward_window(tape, short_days, short_edges, team_ids, pos_ids,
                                          bound, config, model::Arch::gat_tcn, false, drop),
                    ShapeError);

    // The graph-free variant accepts the same window and emits the same shape.
    const auto tcn_params = model::init_params(config, model::Arch::per_node_tcn, 6);
    ad::Tape tape2;
    const auto bound2 = model::bind(tape2, tcn_params);
    const ad::Var out2 = model::forward_window(tape2, days, day_edges, team_ids, pos_ids, bound2,
                                               config, model::Arch::per_node_tcn, false, drop);
    CHECK(tape2.value(out2).dim(0) == 4);
    CHECK(tape2.value(out2).dim(1) == 6);
}

TEST_CASE("permuting players permutes outputs identically") {
    model::ModelConfig config;
    config.window = 2;
    config.tcn_kernel = 2;
    config.tcn_out = 6;
    config.gat_out = 8;
    config.heads = 2;
    config.team_count = 3;
    const auto params = model::init_params(config, model::Arch::gat_tcn, 13);

    const int n = 5;
    Rng rng(29);
    std::vector<Tensor> days = {random_features(rng, n, config.in_features),
                                random_features(rng, n, config.in_features)};
    const std::vector<int> team_ids = {0, 0, 1, 1, 2};
    const std::vector<int> pos_ids = {0, 1, 2, 3, 0};
    const std::vector<graph::GraphSnapshot> snaps = {
        graph::build_snapshot({two_team_game(1, {0, 1}, {2, 3})}),
        graph::build_snapshot({two_team_game(2, {2, 3}, {4})})};
    const std::vector<graph::DirectedEdges> edges = {graph::directed_edges(snaps[0], n),
                                                     graph::directed_edges(snaps[1], n)};

    const auto run = [&](const std::vector<Tensor>& features,
                         const std::vector<graph::DirectedEdges>& day_edges,
                         const std::vector<int>& teams, const std::vector<int>& positions) {
        ad::Tape tape;
        const auto bound = model::bind(tape, params);
        Rng drop(0);
        const std::vector<const graph::DirectedEdges*> ptrs = {&day_edges[0], &day_edges[1]};
        return tape.value(model::forward_window(tape, features, ptrs, teams, positions, bound,
                                                config, model::Arch::gat_tcn, false, drop));
    };
    const Tensor base = run(days, edges, team_ids, pos_ids);

    const std::vector<int> perm = {2, 0, 4, 1, 3};  // new index of each old player
    std::vector<Tensor> perm_days(2, Tensor({n, config.in_features}));
    std::vector<int> perm_teams(n), perm_pos(n);
    for (int i = 0; i < n; ++i) {
        perm_teams[perm[i]] = team_ids[i];
        perm_pos[perm[i]] = pos_ids[i];
        for (int t = 0; t < 2; ++t)
            for (int c = 0; c < config.in_features; ++c)
                perm_days[t](perm[i], c) = days[t](i, c);
    }
    const std::vector<graph::GraphSnapshot> perm_snaps = {
        graph::build_snapshot({two_team_game(1, {perm[0], perm[1]}, {perm[2], perm[3]})}),
        graph::build_snapshot({two_team_game(2, {perm[2], perm[3]}, {perm[4]})})};
    const std::vector<graph::DirectedEdges> perm_edges = {
        graph::directed_edges(perm_snaps[0], n), graph::directed_edges(perm_snaps[1], n)};
    const Tensor permuted = run(perm_days, perm_edges, perm_teams, perm_pos);

    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 6; ++c)
            CHECK(permuted(perm[i], c) == doctest::Approx(base(i, c)).epsilon(1e-10));
}

TEST_CASE("original scoring is static: every query ranks keys identically") {
    model::ModelConfig config;
    config.heads = 1;
    config.gat_out = 8;
    config.team_count = 2;
    const auto params = model::init_params(config, model::Arch::gat_tcn, 23);

    // K5: every player sees every other, self-loops included.
    const auto snapshot = graph::build_snapshot({two_team_game(1, {0, 1, 2}, {3, 4})});
    const auto edges = graph::directed_edges(snapshot, 5);
    Rng rng(31);
    const Tensor features = random_features(rng, 5, config.in_features, 1.5);

    ad::Tape tape;
    const auto bound = model::bind(tape, params);
    const ad::Var g = model::concat_context(tape, tape.leaf(features), {0, 0, 0, 1, 1},
                                            {0, 1, 2, 3, 4}, bound, config);
    const Tensor scores = tape.value(model::gat_v1_scores(tape, g, edges, bound, 0, config));

    int shared_argmax = -1;
    for (int target = 0; target < 5; ++target) {
        int best_source = -1;
        double best = -1e300;
        for (int e = 0; e < edges.edge_count(); ++e) {
            if (edges.target[static_cast<size_t>(e)] != target) continue;
            if (scores.at(e) > best) {
                best = scores.at(e);
                best_source = edges.source[static_cast<size_t>(e)];
            }
        }
        if (shared_argmax == -1) shared_argmax = best_source;
        CHECK(best_source == shared_argmax);
    }
}

TEST_CASE("dynamic scoring fits crossed preferences that static scoring cannot") {
    const double v1_loss = fit_crossed_preferences(false);
    const double v2_loss = fit_crossed_preferences(true);
    CHECK(v2_loss < 0.02);
    CHECK(v1_loss > 0.1);  // analytically bounded below by 0.125
    CHECK(v1_loss - v2_loss > 0.08);
}

TEST_CASE("full forward pass through masked loss passes the finite-difference check") {
    model::ModelConfig config;
    config.in_features = 13;
    config.gat_out = 8;
    config.heads = 2;
    config.window = 4;
    config.tcn_out = 5;
    config.tcn_kernel = 2;
    config.team_count = 3;
    const int n = 6;
    const auto params = model::init_params(config, model::Arch::gat_tcn, 41);
    const std::vector<int> team_ids = {0, 0, 1, 1, 2, 2};
    const std::vector<int> pos_ids = {0, 1, 2, 3, 4, 0};

    // Four window days with varying connectivity, including an idle day.
    const std::vector<graph::GraphSnapshot> snaps = {
        graph::build_snapshot({two_team_game(1, {0, 1}, {2, 3})}),
        graph::build_snapshot({two_team_game(2, {2, 3}, {4, 5})}),
        graph::build_snapshot({two_team_game(3, {0, 1}, {4, 5})}),
        graph::build_snapshot({})};
    std::vector<graph::DirectedEdges> edge_store;
    std::vector<const graph::DirectedEdges*> day_edges;
    for (const auto& s : snaps) edge_store.push_back(graph::directed_edges(s, n));
    for (const auto& e : edge_store) day_edges.push_back(&e);

    Rng rng(43);
    std::vector<Tensor> days;
    for (int t = 0; t < 4; ++t) days.push_back(random_features(rng, n, 13));
    Tensor target({n, 6});
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 6; ++c) target(i, c) = rng.normal();
    const std::vector<std::uint8_t> mask = {1, 0, 1, 1, 0, 1};

    std::vector<std::string> names;
    std::vector<Tensor> inputs;
    for (const auto& p : params.params) {
        names.push_back(p.name);
        inputs.push_back(p.value);
    }
    const auto f = [&](ad::Tape& tape, const std::vector<ad::Var>& vars) {
        model::BoundParams bound;
        for (size_t i = 0; i < vars.size(); ++i) bound.vars.emplace_back(names[i], vars[i]);
        Rng drop(0);
        const ad::Var pred = model::forward_window(tape, days, day_edges, team_ids, pos_ids,
                                                   bound, config, model::Arch::gat_tcn, false,
                                                   drop);
        return tape.masked_mse(pred, target, mask);
    };
    const double err = ad::grad_check(f, inputs, 1e-5);
    CHECK(err < 1e-4);
}
