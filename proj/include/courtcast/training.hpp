#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "courtcast/dataset.hpp"
#include "courtcast/model.hpp"

namespace courtcast::training {

struct TrainConfig {
    double lr = 1e-3;
    double weight_decay = 1e-3;
    int max_epochs = 200;
    int patience = 20;
    std::uint64_t seed = 7;
    int t0 = 10;
    bool mask_loss = true;  // loss over players active on the target day only
    double mape_eps = 1.0;
    std::vector<std::string> targets = data::kDefaultTargets;
    double train_ratio = 0.5;
    double val_ratio = 0.25;
    double test_ratio = 0.25;

    void validate() const;
};

// Everything the loop needs, derived once from a SeasonDataset: forward-filled
// features (one normalized copy for model input, one original-unit copy for
// targets and the persistence baseline), per-day edge lists, window split, and
// activity masks. Normalization statistics use training days only.
struct PreparedData {
    std::vector<int> team_ids;
    std::vector<int> pos_ids;
    std::vector<Tensor> norm_features;  // T x [n x 13], z-scored
    std::vector<Tensor> raw_filled;     // T x [n x 13], original units
    data::NormStats stats;
    std::vector<graph::DirectedEdges> edges;  // per day
    std::vector<data::WindowSample> windows;
    data::SplitIndices split;
    std::vector<int> target_stats;  // column indices of the forecast targets
    std::vector<std::string> target_names;
    std::vector<std::vector<std::uint8_t>> active;  // [T][n]
    std::vector<int> never_observed;
    int train_day_count = 0;
    bool mask_loss = true;

    int player_count() const { return norm_features.empty() ? 0 : norm_features[0].dim(0); }
    int day_count() const { return static_cast<int>(norm_features.size()); }

    // Actual values on a target day, original units, [n x targets].
    Tensor target_for_day(int day) const;
    // Row mask for the loss/metrics on a target day (all ones when masking is
    // off).
    std::vector<std::uint8_t> mask_for_day(int day) const;
};

PreparedData prepare(const data::SeasonDataset& dataset, const TrainConfig& config);

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double val_rmse = 0.0;
    double seconds = 0.0;
};

struct TrainLog {
    std::vector<EpochLog> epochs;
    int best_epoch = 0;
    double best_val_rmse = 0.0;

    // Wall-clock seconds vary run to run, so determinism checks hash the CSV
    // without them.
    std::string to_csv(bool include_seconds = true) const;
};

struct TrainResult {
    model::ModelParams params;  // the validation-selected parameters
    TrainLog log;
};

// Full-batch-per-window training with Adam, chronological window order,
// validation-RMSE model selection, and early stopping after `patience`
// epochs without improvement.
TrainResult train(const PreparedData& prepared, const model::ModelConfig& model_config,
                  const TrainConfig& train_config, model::Arch arch);

enum class Split { train, val, test };

// Predictions pooled over a split: one row per (window, player), original
// units, with the target-day activity mask.
struct SplitPrediction {
    Tensor pred;
    Tensor actual;
    std::vector<std::uint8_t> row_mask;
};

SplitPrediction predict_split(const PreparedData& prepared, const model::ModelParams& params,
                              const model::ModelConfig& model_config, Split split);

// Baseline: predict day t as the forward-filled value at day t-1.
SplitPrediction persistence_split(const PreparedData& prepared, Split split);

// Masked pooled RMSE of a split prediction.
double split_rmse(const SplitPrediction& sp);

// Model archive: every parameter plus the normalization statistics, keyed by
// name, with the training seed.
void save_model(const std::string& path, const model::ModelParams& params,
                const data::NormStats& stats, std::uint64_t seed);

struct LoadedModel {
    model::ModelParams params;
    data::NormStats stats;
    std::uint64_t seed = 0;
};

LoadedModel load_model(const std::string& path, const model::ModelConfig& model_config,
                       model::Arch arch);

}  // namespace courtcast::training
