#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "courtcast/model.hpp"
#include "courtcast/training.hpp"

namespace courtcast::config {

// Every tunable of a run as one flat key=value document. Defaults follow the
// reference setup: window 10, 4 heads x 8 = 32 attention features, TCN width
// 64 with kernel 3, Adam at 1e-3. Precedence: CLI flag > config file >
// default; the fully resolved document is written next to each run's outputs.
struct RunConfig {
    std::string model = "gat_tcn";  // gat_tcn | tcn
    std::uint64_t seed = 7;
    int t0 = 10;
    int epochs = 200;
    int patience = 20;
    double lr = 1e-3;
    double weight_decay = 1e-3;
    int heads = 4;
    int gat_dim = 32;
    int tcn_dim = 64;
    int kernel = 3;
    int team_emb_dim = 2;
    int pos_emb_dim = 2;
    double dropout = 0.0;
    double leaky_slope = 0.2;
    std::string targets = "PTS,REB,AST,STL,BLK,TO";
    double mape_eps = 1.0;
    int bins = 40;
    double minutes_threshold = 10.0;
    bool mask_loss = true;
    double train_ratio = 0.5;
    double val_ratio = 0.25;
    double test_ratio = 0.25;

    std::vector<std::string> target_list() const;
    model::Arch arch() const;
    model::ModelConfig model_config(int team_count, int position_count) const;
    training::TrainConfig train_config() const;

    // The resolved document, one sorted key=value per line.
    std::string to_text() const;
};

// Sets one key; unknown keys and unparsable values are ConfigErrors.
void apply_key(RunConfig& config, const std::string& key, const std::string& value);

// Reads a key=value file ('#' starts a comment, blank lines ignored) on top
// of `base`.
RunConfig load_config_file(const std::string& path, RunConfig base = {});

void write_resolved(const std::string& path, const RunConfig& config);

}  // namespace courtcast::config
