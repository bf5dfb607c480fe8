#include "courtcast/model.hpp"

#include <algorithm>

namespace courtcast::model {

std::string arch_name(Arch arch) {
    return arch == Arch::gat_tcn ? "gat_tcn" : "per_node_tcn";
}

Arch arch_from_name(const std::string& name) {
    if (name == "gat_tcn") return Arch::gat_tcn;
    if (name == "per_node_tcn") return Arch::per_node_tcn;
    throw ConfigError("unknown model '" + name + "' (expected gat_tcn or per_node_tcn)");
}

void ModelConfig::validate() const {
    if (in_features < 1 || team_emb_dim < 1 || pos_emb_dim < 1 || gat_out < 1 || heads < 1 ||
        window < 1 || tcn_out < 1 || tcn_kernel < 1 || out_features < 1 || team_count < 1 ||
        position_count < 1)
        throw ConfigError("model dimensions must all be at least 1");
    if (gat_out % heads != 0)
        throw ConfigError("attention width " + std::to_string(gat_out) +
                          " must divide evenly across " + std::to_string(heads) + " heads");
    if (tcn_kernel > window)
        throw ConfigError("kernel width " + std::to_string(tcn_kernel) +
                          " exceeds window length " + std::to_string(window));
    if (leaky_slope <= 0.0 || leaky_slope >= 1.0)
        throw ConfigError("leaky slope must lie in (0,1)");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must lie in [0,1)");
}

ad::Parameter& ModelParams::find(const std::string& name) {
    for (auto& p : params)
        if (p.name == name) return p;
    throw Error("no parameter named '" + name + "'");
}

const ad::Parameter& ModelParams::find(const std::string& name) const {
    for (const auto& p : params)
        if (p.name == name) return p;
    throw Error("no parameter named '" + name + "'");
}

void ModelParams::zero_grads() {
    for (auto& p : params) p.zero_grad();
}

ModelParams init_params(const ModelConfig& config, Arch arch, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    ModelParams mp;
    mp.arch = arch;

    const auto add = [&](const std::string& name, std::vector<int> shape, int fan_in,
                         int fan_out) {
        Tensor t(std::move(shape));
        ad::xavier_uniform(t, fan_in, fan_out, rng);
        mp.params.emplace_back(name, std::move(t));
    };

    const int d = config.context_dim();
    const int hd = config.head_dim();

    add("emb.team", {config.team_count, config.team_emb_dim}, config.team_count,
        config.team_emb_dim);
    add("emb.pos", {config.position_count, config.pos_emb_dim}, config.position_count,
        config.pos_emb_dim);

    if (arch == Arch::gat_tcn) {
        for (int h = 0; h < config.heads; ++h) {
            const std::string prefix = "head" + std::to_string(h);
            add(prefix + ".w_l", {d, hd}, d, hd);
            add(prefix + ".w_r", {d, hd}, d, hd);
            add(prefix + ".a", {hd, 1}, hd, 1);
        }
    } else {
        add("base.w", {d, config.gat_out}, d, config.gat_out);
    }

    add("tcn.kernel", {config.tcn_out, config.gat_out, config.tcn_kernel},
        config.gat_out * config.tcn_kernel, config.tcn_out * config.tcn_kernel);
    add("out.w", {config.flat_dim(), config.out_features}, config.flat_dim(),
        config.out_features);
    mp.params.emplace_back("out.b", Tensor({config.out_features}));  // zeros
    return mp;
}

BoundParams bind(ad::Tape& tape, const ModelParams& params) {
    BoundParams bound;
    bound.vars.reserve(params.params.size());
    for (const auto& p : params.params) bound.vars.emplace_back(p.name, tape.leaf(p.value));
    return bound;
}

ad::Var BoundParams::at(const std::string& name) const {
    for (const auto& [n, v] : vars)
        if (n == name) return v;
    throw Error("no bound parameter named '" + name + "'");
}

void accumulate_grads(const ad::Tape& tape, const BoundParams& bound, ModelParams& params) {
    for (const auto& [name, var] : bound.vars) {
        ad::Parameter& p = params.find(name);
        const Tensor& g = tape.grad(var);
        if (!g.same_shape(p.grad))
            throw ShapeError("gradient shape mismatch for '" + name + "'");
        p.grad.array() += g.array();
    }
}

ad::Var concat_context(ad::Tape& tape, ad::Var features, const std::vector<int>& team_ids,
                       const std::vector<int>& pos_ids, const BoundParams& bound,
                       const ModelConfig& config) {
    const int n = tape.value(features).dim(0);
    if (tape.value(features).dim(1) != config.in_features)
        throw ShapeError("expected " + std::to_string(config.in_features) +
                         " feature columns, got " +
                         std::to_string(tape.value(features).dim(1)));
    if (static_cast<int>(team_ids.size()) != n || static_cast<int>(pos_ids.size()) != n)
        throw ShapeError("one team id and one position id per player required");

    const ad::Var team = ad::embedding_lookup(tape, bound.at("emb.team"), team_ids);
    const ad::Var pos = ad::embedding_lookup(tape, bound.at("emb.pos"), pos_ids);
    return tape.concat_cols({features, team, pos});
}

namespace {

// Shared edge-gather used by both scoring variants: rows of W_l g for targets
// plus rows of W_r g for sources, one row per directed edge.
ad::Var edge_sum(ad::Tape& tape, ad::Var g, const graph::DirectedEdges& edges,
                 ad::Var w_l, ad::Var w_r) {
    const ad::Var gl = tape.matmul(g, w_l);
    const ad::Var gr = tape.matmul(g, w_r);
    return tape.add(tape.gather_rows(gl, edges.target), tape.gather_rows(gr, edges.source));
}

}  // namespace

ad::Var gatv2_scores(ad::Tape& tape, ad::Var g, const graph::DirectedEdges& edges,
                     const BoundParams& bound, int head, const ModelConfig& config) {
    const std::string prefix = "head" + std::to_string(head);
    const ad::Var pre = edge_sum(tape, g, edges, bound.at(prefix + ".w_l"),
                                 bound.at(prefix + ".w_r"));
    const ad::Var activated = tape.leaky_relu(pre, config.leaky_slope);
    return tape.reshape(tape.matmul(activated, bound.at(prefix + ".a")), {edges.edge_count()});
}

ad::Var gat_v1_scores(ad::Tape& tape, ad::Var g, const graph::DirectedEdges& edges,
                      const BoundParams& bound, int head, const ModelConfig& config) {
    const std::string prefix = "head" + std::to_string(head);
    const ad::Var pre = edge_sum(tape, g, edges, bound.at(prefix + ".w_l"),
                                 bound.at(prefix + ".w_r"));
    const ad::Var projected = tape.matmul(pre, bound.at(prefix + ".a"));
    return tape.reshape(tape.leaky_relu(projected, config.leaky_slope),
                        {edges.edge_count()});
}

ad::Var gatv2_layer(ad::Tape& tape, ad::Var g, const graph::DirectedEdges& edges,
                    const BoundParams& bound, const ModelConfig& config, bool training,
                    Rng& rng) {
    std::vector<ad::Var> heads;
    heads.reserve(static_cast<size_t>(config.heads));
    for (int h = 0; h < config.heads; ++h) {
        const ad::Var scores = gatv2_scores(tape, g, edges, bound, h, config);
        ad::Var alpha = tape.segment_softmax(scores, edges.target, edges.node_count);
        alpha = tape.dropout(alpha, config.dropout, training, rng);
        const std::string prefix = "head" + std::to_string(h);
        const ad::Var neighbor_values =
            tape.gather_rows(tape.matmul(g, bound.at(prefix + ".w_r")), edges.source);
        const ad::Var mixed = tape.segment_weighted_sum(alpha, neighbor_values, edges.target,
                                                        edges.node_count);
        heads.push_back(tape.elu(mixed));
    }
    return heads.size() == 1 ? heads[0] : tape.concat_cols(heads);
}

ad::Var per_node_layer(ad::Tape& tape, ad::Var g, const BoundParams& bound) {
    return tape.elu(tape.matmul(g, bound.at("base.w")));
}

ad::Var tcn_head(ad::Tape& tape, ad::Var h_seq, const BoundParams& bound,
                 const ModelConfig& config) {
    const int n = tape.value(h_seq).dim(0);
    const ad::Var conv = tape.conv1d_time(tape.relu(h_seq), bound.at("tcn.kernel"));
    const ad::Var flat = tape.reshape(conv, {n, config.flat_dim()});
    return ad::linear(tape, flat, bound.at("out.w"), bound.at("out.b"));
}

ad::Var forward_window(ad::Tape& tape, const std::vector<Tensor>& day_features,
                       const std::vector<const graph::DirectedEdges*>& day_edges,
                       const std::vector<int>& team_ids, const std::vector<int>& pos_ids,
                       const BoundParams& bound, const ModelConfig& config, Arch arch,
                       bool training, Rng& rng) {
    if (static_cast<int>(day_features.size()) != config.window)
        throw ShapeError("window holds " + std::to_string(day_features.size()) +
                         " days, expected " + std::to_string(config.window));
    if (arch == Arch::gat_tcn && day_edges.size() != day_features.size())
        throw ShapeError("one edge list per window day required");

    std::vector<ad::Var> day_reprs;
    day_reprs.reserve(day_features.size());
    for (size_t t = 0; t < day_features.size(); ++t) {
        const ad::Var f = tape.leaf(day_features[t]);
        const ad::Var g = concat_context(tape, f, team_ids, pos_ids, bound, config);
        day_reprs.push_back(arch == Arch::gat_tcn
                                ? gatv2_layer(tape, g, *day_edges[t], bound, config, training,
                                              rng)
                                : per_node_layer(tape, g, bound));
    }
    return tcn_head(tape, tape.stack_time(day_reprs), bound, config);
}

Eigen::MatrixXd attention_matrix(const Tensor& day_features,
                                 const graph::DirectedEdges& edges,
                                 const std::vector<int>& team_ids,
                                 const std::vector<int>& pos_ids, const ModelParams& params,
                                 const ModelConfig& config) {
    ad::Tape tape;
    const BoundParams bound = bind(tape, params);
    const ad::Var f = tape.leaf(day_features);
    const ad::Var g = concat_context(tape, f, team_ids, pos_ids, bound, config);

    const int n = edges.node_count;
    Eigen::MatrixXd attn = Eigen::MatrixXd::Zero(n, n);
    for (int h = 0; h < config.heads; ++h) {
        const ad::Var scores = gatv2_scores(tape, g, edges, bound, h, config);
        const Tensor alpha =
            tape.value(tape.segment_softmax(scores, edges.target, edges.node_count));
        for (int e = 0; e < edges.edge_count(); ++e) {
            double& cell = attn(edges.target[static_cast<size_t>(e)],
                                edges.source[static_cast<size_t>(e)]);
            cell = std::max(cell, alpha.at(e));
        }
    }
    return attn;
}

}  // namespace courtcast::model
