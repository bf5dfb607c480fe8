#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "courtcast/tensor.hpp"

namespace courtcast::metrics {

// Aggregate error metrics over the entries selected by `mask` (one flag per
// tensor entry; empty mask selects everything). All values are in the units
// of the inputs. Throws when the mask selects nothing.
double rmse(const Tensor& pred, const Tensor& actual,
            const std::vector<std::uint8_t>& mask = {});
double mae(const Tensor& pred, const Tensor& actual,
           const std::vector<std::uint8_t>& mask = {});

// Mean of |pred - actual| / max(|actual|, eps) over selected entries,
// expressed as a fraction (0.10 means ten percent).
double mape(const Tensor& pred, const Tensor& actual, double eps,
            const std::vector<std::uint8_t>& mask = {});

// Pearson correlation per column, Fisher-z averaged: r is clamped to
// +/-(1 - 1e-12), z = atanh(r), result = tanh(mean z). Columns with zero
// variance in either input are excluded (indices reported via `excluded`);
// all columns excluded is an error.
double corr_fisher(const Tensor& pred, const Tensor& actual,
                   std::vector<int>* excluded = nullptr);

// One Higher-Lower entry: a threshold on a statistic (or documented sum of
// statistics), the realized value, and the model's prediction.
struct BetLine {
    std::string date;
    long player_id = 0;
    std::string stat_expr;
    double threshold = 0.0;
    double actual = 0.0;
    double predicted = 0.0;
};

struct BetSummary {
    int correct = 0;
    int total = 0;   // pushes excluded
    int pushes = 0;
    double accuracy = 0.0;  // correct / total
};

// A line is correct when prediction and actual fall on the same side of the
// threshold; actual exactly at the threshold is a push and drops out.
BetSummary bet_eval(const std::vector<BetLine>& lines);

// Metric bundle for one evaluation run, plus per-statistic breakdown.
struct EvalReport {
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    double corr = 0.0;
    long sample_count = 0;  // masked entries
    std::vector<std::string> stat_names;
    std::vector<double> stat_rmse;
    std::vector<double> stat_mae;

    std::string to_csv() const;
    std::string to_table() const;
};

EvalReport evaluate(const Tensor& pred, const Tensor& actual,
                    const std::vector<std::uint8_t>& row_mask,
                    const std::vector<std::string>& stat_names, double mape_eps);

}  // namespace courtcast::metrics
