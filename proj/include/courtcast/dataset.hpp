#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "courtcast/graph.hpp"
#include "courtcast/tensor.hpp"

namespace courtcast::data {

// The 13 per-player statistics, in fixed column order.
inline constexpr int kStatCount = 13;
inline constexpr std::array<const char*, kStatCount> kStatNames = {
    "PTS",  "AST",  "REB",  "TO",   "STL",     "BLK",    "PLUS_MINUS",
    "TCHS", "PASS", "DIST", "PACE", "USG_PCT", "TS_PCT"};

inline constexpr std::array<const char*, 5> kPositionNames = {"C", "G", "F", "F/C", "F/G"};

// The six statistics forecast by default; configurable by name.
inline const std::vector<std::string> kDefaultTargets = {"PTS", "REB", "AST",
                                                         "STL", "BLK", "TO"};

int stat_index(const std::string& name);      // throws ConfigError on unknown name
int position_index(const std::string& name);  // throws ConfigError on unknown name
std::vector<int> stat_indices(const std::vector<std::string>& names);

// A season aligned on the game-day calendar: fixed roster, one graph snapshot
// and one raw n x 13 feature slice per day. observed(t,i) is true exactly when
// player i played at least `minutes_threshold` minutes on day t; feature rows
// where observed is false are zero until forward_fill replaces them.
struct SeasonDataset {
    // Roster, densely indexed 0..n-1 in players-file order.
    std::vector<long> player_ids;
    std::vector<std::string> player_names;
    std::vector<int> player_team;      // dense team index
    std::vector<int> player_position;  // index into kPositionNames

    std::vector<long> team_ids;  // dense team index -> external id
    std::vector<std::string> team_names;

    // Calendar, strictly increasing dates.
    std::vector<std::string> dates;
    std::vector<graph::GraphSnapshot> snapshots;

    // Per-day raw features and participation.
    std::vector<Tensor> features;                     // T tensors of shape [n x 13]
    std::vector<std::vector<std::uint8_t>> observed;  // [T][n], minutes >= threshold
    std::vector<std::vector<double>> minutes;         // [T][n], 0 when absent

    double minutes_threshold = 10.0;
    int game_count = 0;

    int player_count() const { return static_cast<int>(player_ids.size()); }
    int team_count() const { return static_cast<int>(team_ids.size()); }
    int day_count() const { return static_cast<int>(dates.size()); }

    int player_index(long player_id) const;  // -1 when unknown
};

// Reads players.csv, games.csv, boxscores.csv (schemas documented in README)
// and assembles the calendar-aligned dataset. Structural problems carry the
// offending file and line number.
SeasonDataset ingest(const std::string& players_path, const std::string& games_path,
                     const std::string& boxscores_path, double minutes_threshold = 10.0);

// Forward-fill result: gaps replaced by the most recent observation, leading
// gaps backfilled from the first observation, never-observed players zeroed
// and listed in `never_observed`.
struct FilledFeatures {
    std::vector<Tensor> features;  // same shapes as the input
    std::vector<int> never_observed;
};

FilledFeatures forward_fill(const std::vector<Tensor>& raw,
                            const std::vector<std::vector<std::uint8_t>>& observed);

// Per-statistic z-score parameters, computed over a training prefix of days.
struct NormStats {
    Tensor mean;  // [13]
    Tensor std;   // [13], floored at 1e-8
};

// Normalizes every day slice in place using statistics of the first
// `train_day_count` days only (population std over all players and days).
NormStats normalize(std::vector<Tensor>& features, int train_day_count);

// x -> x * std + mean for an [rows x k] tensor whose columns correspond to
// stat_ids; exact inverse of the normalization affine map.
void denormalize_columns(Tensor& values, const NormStats& stats,
                         const std::vector<int>& stat_ids);

// One training sample: input days [target_day - t0, target_day), predict
// target_day.
struct WindowSample {
    int first_day = 0;
    int target_day = 0;
};

// Exactly T - t0 windows with targets at days t0..T-1.
std::vector<WindowSample> make_windows(int day_count, int t0, int horizon = 1);

// Chronological split boundaries over N samples: train gets floor(N*r_train),
// train+val ends at floor(N*(r_train+r_val)).
struct SplitIndices {
    int train_end = 0;  // samples [0, train_end)
    int val_end = 0;    // samples [train_end, val_end); test = [val_end, N)
    int total = 0;

    int train_count() const { return train_end; }
    int val_count() const { return val_end - train_end; }
    int test_count() const { return total - val_end; }
};

SplitIndices chrono_split(int sample_count, double train_ratio = 0.5, double val_ratio = 0.25,
                          double test_ratio = 0.25);

}  // namespace courtcast::data
