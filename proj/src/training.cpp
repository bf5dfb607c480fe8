#include "courtcast/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "courtcast/checkpoint.hpp"
#include "courtcast/csv.hpp"
#include "courtcast/error.hpp"
#include "courtcast/metrics.hpp"
#include "courtcast/optim.hpp"
#include "courtcast/rng.hpp"
#include "courtcast/tape.hpp"

namespace courtcast::training {

void TrainConfig::validate() const {
    if (lr < 0.0) throw ConfigError("learning rate must be non-negative, got " + std::to_string(lr));
    if (weight_decay < 0.0) {
        throw ConfigError("weight decay must be non-negative, got " + std::to_string(weight_decay));
    }
    if (max_epochs < 1) {
        throw ConfigError("max_epochs must be at least 1, got " + std::to_string(max_epochs));
    }
    if (patience < 1) {
        throw ConfigError("patience must be at least 1, got " + std::to_string(patience));
    }
    if (t0 < 1) throw ConfigError("t0 must be at least 1, got " + std::to_string(t0));
    if (mape_eps <= 0.0) {
        throw ConfigError("mape_eps must be positive, got " + std::to_string(mape_eps));
    }
    if (targets.empty()) throw ConfigError("at least one target statistic is required");
}

Tensor PreparedData::target_for_day(int day) const {
    if (day < 0 || day >= day_count()) {
        throw Error("target day " + std::to_string(day) + " outside 0.." +
                    std::to_string(day_count() - 1));
    }
    const int n = player_count();
    const int k = static_cast<int>(target_stats.size());
    Tensor out({n, k});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) out(i, j) = raw_filled[day](i, target_stats[j]);
    }
    return out;
}

std::vector<std::uint8_t> PreparedData::mask_for_day(int day) const {
    if (day < 0 || day >= day_count()) {
        throw Error("mask day " + std::to_string(day) + " outside 0.." +
                    std::to_string(day_count() - 1));
    }
    if (!mask_loss) return std::vector<std::uint8_t>(player_count(), 1);
    return active[day];
}

PreparedData prepare(const data::SeasonDataset& dataset, const TrainConfig& config) {
    config.validate();
    const int days = dataset.day_count();
    if (days <= config.t0) {
        throw ConfigError("need more than t0=" + std::to_string(config.t0) + " game days, have " +
                          std::to_string(days));
    }

    PreparedData out;
    out.team_ids = dataset.player_team;
    out.pos_ids = dataset.player_position;
    out.target_stats = data::stat_indices(config.targets);
    out.target_names = config.targets;
    out.active = dataset.observed;
    out.mask_loss = config.mask_loss;

    data::FilledFeatures filled = data::forward_fill(dataset.features, dataset.observed);
    out.raw_filled = filled.features;
    out.never_observed = filled.never_observed;

    out.windows = data::make_windows(days, config.t0);
    out.split = data::chrono_split(static_cast<int>(out.windows.size()), config.train_ratio,
                                   config.val_ratio, config.test_ratio);
    // Training windows target days t0 .. t0 + train_count - 1, so every day a
    // training sample can see (inputs or target) lies below this bound.
    out.train_day_count = config.t0 + out.split.train_count();

    out.norm_features = filled.features;
    out.stats = data::normalize(out.norm_features, out.train_day_count);

    out.edges.reserve(dataset.snapshots.size());
    for (const auto& snapshot : dataset.snapshots) {
        out.edges.push_back(graph::directed_edges(snapshot, dataset.player_count()));
    }
    return out;
}

namespace {

struct SplitRange {
    int begin = 0;
    int end = 0;
};

SplitRange split_range(const data::SplitIndices& split, Split which) {
    switch (which) {
        case Split::train: return {0, split.train_end};
        case Split::val: return {split.train_end, split.val_end};
        case Split::test: return {split.val_end, split.total};
    }
    throw Error("unknown split");
}

Tensor target_column_tensor(const Tensor& stats_vec, const std::vector<int>& target_stats) {
    Tensor out({static_cast<int>(target_stats.size())});
    for (int j = 0; j < static_cast<int>(target_stats.size()); ++j) {
        out.at(j) = stats_vec.at(target_stats[j]);
    }
    return out;
}

// Forward pass for one window; prediction comes back in original units
// (normalized output rescaled on the tape so gradients see the affine map).
ad::Var window_prediction(ad::Tape& tape, const PreparedData& prepared,
                          const model::BoundParams& bound, const model::ModelConfig& model_config,
                          model::Arch arch, const data::WindowSample& window, bool training,
                          Rng& rng) {
    std::vector<Tensor> day_features;
    std::vector<const graph::DirectedEdges*> day_edges;
    day_features.reserve(window.target_day - window.first_day);
    for (int d = window.first_day; d < window.target_day; ++d) {
        day_features.push_back(prepared.norm_features[d]);
        day_edges.push_back(&prepared.edges[d]);
    }
    ad::Var pred_norm =
        model::forward_window(tape, day_features, day_edges, prepared.team_ids, prepared.pos_ids,
                              bound, model_config, arch, training, rng);
    ad::Var std_row = tape.leaf(target_column_tensor(prepared.stats.std, prepared.target_stats));
    ad::Var mean_row = tape.leaf(target_column_tensor(prepared.stats.mean, prepared.target_stats));
    return tape.add_row_vector(tape.mul_row_vector(pred_norm, std_row), mean_row);
}

}  // namespace

TrainResult train(const PreparedData& prepared, const model::ModelConfig& model_config,
                  const TrainConfig& train_config, model::Arch arch) {
    model_config.validate();
    train_config.validate();
    if (model_config.window != train_config.t0) {
        throw ConfigError("model window (" + std::to_string(model_config.window) +
                          ") must equal t0 (" + std::to_string(train_config.t0) + ")");
    }
    if (static_cast<int>(prepared.target_stats.size()) != model_config.out_features) {
        throw ConfigError("model emits " + std::to_string(model_config.out_features) +
                          " outputs but " + std::to_string(prepared.target_stats.size()) +
                          " targets were prepared");
    }

    model::ModelParams params = model::init_params(model_config, arch, train_config.seed);
    ad::AdamConfig adam;
    adam.lr = train_config.lr;
    adam.weight_decay = train_config.weight_decay;

    // Consumed only when dropout is active, so a zero-dropout run draws
    // nothing from it.
    Rng dropout_rng(train_config.seed ^ 0x9e3779b97f4a7c15ULL);

    const SplitRange train_windows = split_range(prepared.split, Split::train);
    if (train_windows.end - train_windows.begin < 1) throw ConfigError("no training windows");

    TrainResult result;
    result.params = params;  // placeholder until the first epoch completes
    double best_val = std::numeric_limits<double>::infinity();
    int epochs_since_best = 0;

    for (int epoch = 1; epoch <= train_config.max_epochs; ++epoch) {
        const auto t_start = std::chrono::steady_clock::now();
        double loss_sum = 0.0;
        for (int w = train_windows.begin; w < train_windows.end; ++w) {
            const data::WindowSample& window = prepared.windows[w];
            ad::Tape tape;
            model::BoundParams bound = model::bind(tape, params);
            ad::Var pred = window_prediction(tape, prepared, bound, model_config, arch, window,
                                             /*training=*/true, dropout_rng);
            ad::Var loss = tape.masked_mse(pred, prepared.target_for_day(window.target_day),
                                           prepared.mask_for_day(window.target_day));
            const double loss_value = tape.value(loss).at(0);
            if (!std::isfinite(loss_value)) {
                throw Error("training diverged: non-finite loss at epoch " +
                            std::to_string(epoch) + ", window " + std::to_string(w) +
                            " (target day " + std::to_string(window.target_day) + ")");
            }
            loss_sum += loss_value;
            tape.backward(loss);
            params.zero_grads();
            model::accumulate_grads(tape, bound, params);
            ad::adam_step(params.params, adam);
        }
        const double train_loss = loss_sum / (train_windows.end - train_windows.begin);
        const double val_rmse =
            split_rmse(predict_split(prepared, params, model_config, Split::val));
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        result.log.epochs.push_back({epoch, train_loss, val_rmse, seconds});

        if (val_rmse < best_val) {
            best_val = val_rmse;
            result.params = params;
            result.log.best_epoch = epoch;
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
            if (epochs_since_best >= train_config.patience) break;
        }
    }
    result.log.best_val_rmse = best_val;
    return result;
}

SplitPrediction predict_split(const PreparedData& prepared, const model::ModelParams& params,
                              const model::ModelConfig& model_config, Split split) {
    const SplitRange range = split_range(prepared.split, split);
    if (range.end - range.begin < 1) throw Error("empty split");
    const int n = prepared.player_count();
    const int k = static_cast<int>(prepared.target_stats.size());
    const int rows = (range.end - range.begin) * n;

    SplitPrediction out;
    out.pred = Tensor({rows, k});
    out.actual = Tensor({rows, k});
    out.row_mask.resize(rows);
    Rng unused(0);

    for (int w = range.begin; w < range.end; ++w) {
        const data::WindowSample& window = prepared.windows[w];
        ad::Tape tape;
        model::BoundParams bound = model::bind(tape, params);
        ad::Var pred = window_prediction(tape, prepared, bound, model_config, params.arch, window,
                                         /*training=*/false, unused);
        const Tensor pred_value = tape.value(pred);
        const Tensor actual = prepared.target_for_day(window.target_day);
        const std::vector<std::uint8_t> mask = prepared.mask_for_day(window.target_day);
        const int base = (w - range.begin) * n;
        for (int i = 0; i < n; ++i) {
            out.row_mask[base + i] = mask[i];
            for (int j = 0; j < k; ++j) {
                out.pred(base + i, j) = pred_value(i, j);
                out.actual(base + i, j) = actual(i, j);
            }
        }
    }
    return out;
}

SplitPrediction persistence_split(const PreparedData& prepared, Split split) {
    const SplitRange range = split_range(prepared.split, split);
    if (range.end - range.begin < 1) throw Error("empty split");
    const int n = prepared.player_count();
    const int k = static_cast<int>(prepared.target_stats.size());
    const int rows = (range.end - range.begin) * n;

    SplitPrediction out;
    out.pred = Tensor({rows, k});
    out.actual = Tensor({rows, k});
    out.row_mask.resize(rows);
    for (int w = range.begin; w < range.end; ++w) {
        const data::WindowSample& window = prepared.windows[w];
        const Tensor actual = prepared.target_for_day(window.target_day);
        const std::vector<std::uint8_t> mask = prepared.mask_for_day(window.target_day);
        const int base = (w - range.begin) * n;
        for (int i = 0; i < n; ++i) {
            out.row_mask[base + i] = mask[i];
            for (int j = 0; j < k; ++j) {
                out.pred(base + i, j) =
                    prepared.raw_filled[window.target_day - 1](i, prepared.target_stats[j]);
                out.actual(base + i, j) = actual(i, j);
            }
        }
    }
    return out;
}

double split_rmse(const SplitPrediction& sp) {
    const int rows = sp.pred.dim(0);
    const int cols = sp.pred.dim(1);
    std::vector<std::uint8_t> entry_mask(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            entry_mask[static_cast<std::size_t>(r) * cols + c] = sp.row_mask[r];
        }
    }
    return metrics::rmse(sp.pred, sp.actual, entry_mask);
}

std::string TrainLog::to_csv(bool include_seconds) const {
    std::string out = include_seconds ? "epoch,train_loss,val_rmse,seconds\n"
                                      : "epoch,train_loss,val_rmse\n";
    for (const EpochLog& e : epochs) {
        out += std::to_string(e.epoch);
        out += ',';
        out += csv::format_double(e.train_loss);
        out += ',';
        out += csv::format_double(e.val_rmse);
        if (include_seconds) {
            out += ',';
            out += csv::format_double(e.seconds);
        }
        out += '\n';
    }
    return out;
}

void save_model(const std::string& path, const model::ModelParams& params,
                const data::NormStats& stats, std::uint64_t seed) {
    Checkpoint cp;
    cp.seed = seed;
    for (const ad::Parameter& p : params.params) cp.entries.emplace_back(p.name, p.value);
    cp.entries.emplace_back("norm.mean", stats.mean);
    cp.entries.emplace_back("norm.std", stats.std);
    save_checkpoint(cp, path);
}

LoadedModel load_model(const std::string& path, const model::ModelConfig& model_config,
                       model::Arch arch) {
    const Checkpoint cp = load_checkpoint(path);
    LoadedModel out{model::init_params(model_config, arch, cp.seed), data::NormStats{}, cp.seed};

    std::unordered_set<std::string> seen;
    bool have_mean = false;
    bool have_std = false;
    for (const auto& [name, value] : cp.entries) {
        if (!seen.insert(name).second) {
            throw Error("duplicate entry '" + name + "' in model file " + path);
        }
        if (name == "norm.mean") {
            out.stats.mean = value;
            have_mean = true;
            continue;
        }
        if (name == "norm.std") {
            out.stats.std = value;
            have_std = true;
            continue;
        }
        ad::Parameter& p = out.params.find(name);
        if (p.value.shape() != value.shape()) {
            throw Error("entry '" + name + "' in " + path + " has shape " + value.shape_string() +
                        ", model expects " + p.value.shape_string());
        }
        p.value = value;
    }
    if (!have_mean || !have_std) {
        throw Error("model file " + path + " is missing normalization statistics");
    }
    const std::size_t expected = out.params.params.size() + 2;
    if (cp.entries.size() != expected) {
        throw Error("model file " + path + " holds " + std::to_string(cp.entries.size()) +
                    " entries, expected " + std::to_string(expected));
    }
    return out;
}

}  // namespace courtcast::training
