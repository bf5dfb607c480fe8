#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "courtcast/config.hpp"
#include "courtcast/error.hpp"
#include "fixtures.hpp"

using namespace courtcast;

TEST_CASE("defaults match the reference setup and derive valid sub-configs") {
    const config::RunConfig run;
    CHECK(run.model == "gat_tcn");
    CHECK(run.seed == 7);
    CHECK(run.t0 == 10);
    CHECK(run.heads == 4);
    CHECK(run.gat_dim == 32);
    CHECK(run.tcn_dim == 64);
    CHECK(run.kernel == 3);
    CHECK(run.lr == 1e-3);
    CHECK(run.weight_decay == 1e-3);
    CHECK(run.arch() == model::Arch::gat_tcn);
    CHECK(run.target_list() ==
          std::vector<std::string>{"PTS", "REB", "AST", "STL", "BLK", "TO"});

    const auto mc = run.model_config(30, 5);
    CHECK(mc.window == 10);
    CHECK(mc.gat_out == 32);
    CHECK(mc.tcn_out == 64);
    CHECK(mc.team_count == 30);
    const auto tc = run.train_config();
    CHECK(tc.seed == 7);
    CHECK(tc.max_epochs == 200);
    CHECK(tc.targets.size() == 6);
}

TEST_CASE("apply_key sets every field type and rejects bad input") {
    config::RunConfig run;
    config::apply_key(run, "model", "tcn");
    CHECK(run.arch() == model::Arch::per_node_tcn);
    config::apply_key(run, "seed", "123");
    CHECK(run.seed == 123);
    config::apply_key(run, "lr", "0.05");
    CHECK(run.lr == 0.05);
    config::apply_key(run, "mask_loss", "false");
    CHECK_FALSE(run.mask_loss);
    config::apply_key(run, "mask_loss", "true");
    CHECK(run.mask_loss);
    config::apply_key(run, "targets", "PTS,AST");
    CHECK(run.target_list() == std::vector<std::string>{"PTS", "AST"});
    config::apply_key(run, "train_ratio", "0.6");
    CHECK(run.train_ratio == 0.6);

    CHECK_THROWS_AS(config::apply_key(run, "learning_rate", "0.1"), ConfigError);
    CHECK_THROWS_AS(config::apply_key(run, "", "0.1"), ConfigError);
    CHECK_THROWS_AS(config::apply_key(run, "epochs", "many"), ConfigError);
    CHECK_THROWS_AS(config::apply_key(run, "epochs", "2.5"), ConfigError);
    CHECK_THROWS_AS(config::apply_key(run, "lr", "fast"), ConfigError);
    CHECK_THROWS_AS(config::apply_key(run, "mask_loss", "maybe"), ConfigError);
    CHECK_THROWS_AS(config::apply_key(run, "seed", "-1"), ConfigError);
}

TEST_CASE("invalid derived configurations fail at derivation time") {
    config::RunConfig run;
    run.model = "transformer";
    CHECK_THROWS_AS(run.arch(), ConfigError);
    run.model = "gat_tcn";
    run.targets = "PTS,,AST";
    CHECK_THROWS_AS(run.target_list(), ConfigError);
    run.targets = "PTS,GOALS";
    CHECK_THROWS_AS(run.target_list(), ConfigError);
    run.targets = "PTS";
    run.heads = 3;  // 32 not divisible by 3
    CHECK_THROWS_AS(run.model_config(30, 5), ConfigError);
    run.heads = 4;
    run.kernel = 99;
    CHECK_THROWS_AS(run.model_config(30, 5), ConfigError);
    run.kernel = 3;
    run.epochs = 0;
    CHECK_THROWS_AS(run.train_config(), ConfigError);
}

TEST_CASE("the resolved document lists every key and reparses to itself") {
    config::RunConfig run;
    run.seed = 99;
    run.lr = 0.0025;
    run.model = "tcn";
    const std::string text = run.to_text();

    // One line per field, sorted, each key exactly once.
    std::vector<std::string> lines;
    std::string line;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(line);
            line.clear();
        } else {
            line += c;
        }
    }
    CHECK(lines.size() == 23);
    CHECK(std::is_sorted(lines.begin(), lines.end()));
    config::RunConfig reparsed;
    for (const auto& l : lines) {
        const auto eq = l.find('=');
        REQUIRE(eq != std::string::npos);
        config::apply_key(reparsed, l.substr(0, eq), l.substr(eq + 1));
    }
    CHECK(reparsed.to_text() == text);
    CHECK(reparsed.seed == 99);
    CHECK(reparsed.lr == 0.0025);
}

TEST_CASE("config files layer on top of a base and report parse errors") {
    const auto dir = fixtures::fresh_dir("config");
    fixtures::write_file(dir, "run.cfg",
                         "# experiment overrides\n"
                         "\n"
                         "lr = 0.01\n"
                         "epochs=50\n"
                         "model = tcn   \n"
                         "targets = PTS,REB\n");
    config::RunConfig base;
    base.seed = 42;
    const auto run = config::load_config_file((dir / "run.cfg").string(), base);
    CHECK(run.seed == 42);  // base survives
    CHECK(run.lr == 0.01);
    CHECK(run.epochs == 50);
    CHECK(run.model == "tcn");
    CHECK(run.target_list() == std::vector<std::string>{"PTS", "REB"});

    fixtures::write_file(dir, "broken.cfg", "lr = 0.01\nnot a pair\n");
    try {
        config::load_config_file((dir / "broken.cfg").string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("broken.cfg") != std::string::npos);
        CHECK(what.find(":2") != std::string::npos);
    }
    fixtures::write_file(dir, "unknown.cfg", "warp_speed = 9\n");
    CHECK_THROWS_AS(config::load_config_file((dir / "unknown.cfg").string()), ConfigError);
    CHECK_THROWS_AS(config::load_config_file((dir / "missing.cfg").string()), Error);

    config::write_resolved((dir / "resolved.cfg").string(), run);
    const auto reread = config::load_config_file((dir / "resolved.cfg").string());
    CHECK(reread.to_text() == run.to_text());
}
