#include "courtcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "courtcast/csv.hpp"

namespace courtcast::metrics {

namespace {

void check_pair(const Tensor& pred, const Tensor& actual,
                const std::vector<std::uint8_t>& mask) {
    if (!pred.same_shape(actual))
        throw ShapeError("metric inputs differ in shape: " + pred.shape_string() + " vs " +
                         actual.shape_string());
    if (!mask.empty() && static_cast<Eigen::Index>(mask.size()) != pred.size())
        throw ShapeError("metric mask length does not match tensor size");
}

bool selected(const std::vector<std::uint8_t>& mask, Eigen::Index i) {
    return mask.empty() || mask[static_cast<size_t>(i)];
}

}  // namespace

double rmse(const Tensor& pred, const Tensor& actual, const std::vector<std::uint8_t>& mask) {
    check_pair(pred, actual, mask);
    double acc = 0.0;
    long count = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        if (!selected(mask, i)) continue;
        const double d = pred.at(i) - actual.at(i);
        acc += d * d;
        ++count;
    }
    if (count == 0) throw Error("rmse: mask selects no entries");
    return std::sqrt(acc / static_cast<double>(count));
}

double mae(const Tensor& pred, const Tensor& actual, const std::vector<std::uint8_t>& mask) {
    check_pair(pred, actual, mask);
    double acc = 0.0;
    long count = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        if (!selected(mask, i)) continue;
        acc += std::abs(pred.at(i) - actual.at(i));
        ++count;
    }
    if (count == 0) throw Error("mae: mask selects no entries");
    return acc / static_cast<double>(count);
}

double mape(const Tensor& pred, const Tensor& actual, double eps,
            const std::vector<std::uint8_t>& mask) {
    check_pair(pred, actual, mask);
    if (eps <= 0.0) throw Error("mape: eps must be positive");
    double acc = 0.0;
    long count = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        if (!selected(mask, i)) continue;
        acc += std::abs(pred.at(i) - actual.at(i)) / std::max(std::abs(actual.at(i)), eps);
        ++count;
    }
    if (count == 0) throw Error("mape: mask selects no entries");
    return acc / static_cast<double>(count);
}

double corr_fisher(const Tensor& pred, const Tensor& actual, std::vector<int>* excluded) {
    if (pred.rank() != 2 || !pred.same_shape(actual))
        throw ShapeError("corr_fisher expects two equal rank-2 tensors");
    const int rows = pred.dim(0);
    const int cols = pred.dim(1);
    if (rows < 2) throw Error("corr_fisher: need at least 2 rows");

    double z_sum = 0.0;
    int used = 0;
    for (int c = 0; c < cols; ++c) {
        double mean_p = 0.0, mean_a = 0.0;
        for (int i = 0; i < rows; ++i) {
            mean_p += pred(i, c);
            mean_a += actual(i, c);
        }
        mean_p /= rows;
        mean_a /= rows;

        double var_p = 0.0, var_a = 0.0, cov = 0.0;
        for (int i = 0; i < rows; ++i) {
            const double dp = pred(i, c) - mean_p;
            const double da = actual(i, c) - mean_a;
            var_p += dp * dp;
            var_a += da * da;
            cov += dp * da;
        }
        if (var_p == 0.0 || var_a == 0.0) {
            if (excluded) excluded->push_back(c);
            continue;
        }
        double r = cov / std::sqrt(var_p * var_a);
        r = std::clamp(r, -(1.0 - 1e-12), 1.0 - 1e-12);
        z_sum += std::atanh(r);
        ++used;
    }
    if (used == 0) throw Error("corr_fisher: every column has zero variance");
    return std::tanh(z_sum / used);
}

BetSummary bet_eval(const std::vector<BetLine>& lines) {
    BetSummary summary;
    for (const BetLine& line : lines) {
        if (!std::isfinite(line.threshold)) throw Error("bet_eval: non-finite threshold");
        if (line.actual == line.threshold) {
            ++summary.pushes;
            continue;
        }
        ++summary.total;
        const bool actual_higher = line.actual > line.threshold;
        const bool predicted_higher = line.predicted > line.threshold;
        // A prediction exactly at the threshold takes neither side and loses.
        if (line.predicted != line.threshold && predicted_higher == actual_higher)
            ++summary.correct;
    }
    if (summary.total == 0) throw Error("bet_eval: no decidable lines");
    summary.accuracy = static_cast<double>(summary.correct) / summary.total;
    return summary;
}

EvalReport evaluate(const Tensor& pred, const Tensor& actual,
                    const std::vector<std::uint8_t>& row_mask,
                    const std::vector<std::string>& stat_names, double mape_eps) {
    if (pred.rank() != 2 || !pred.same_shape(actual))
        throw ShapeError("evaluate expects two equal rank-2 tensors");
    if (static_cast<int>(stat_names.size()) != pred.dim(1))
        throw ShapeError("evaluate: one statistic name per column required");
    if (!row_mask.empty() && static_cast<int>(row_mask.size()) != pred.dim(0))
        throw ShapeError("evaluate: one mask flag per row required");

    // Compact the selected rows so every metric sees the same sample.
    int kept = 0;
    for (int i = 0; i < pred.dim(0); ++i)
        if (row_mask.empty() || row_mask[static_cast<size_t>(i)]) ++kept;
    if (kept == 0) throw Error("evaluate: mask selects no rows");

    Tensor p({kept, pred.dim(1)});
    Tensor a({kept, pred.dim(1)});
    int r = 0;
    for (int i = 0; i < pred.dim(0); ++i) {
        if (!row_mask.empty() && !row_mask[static_cast<size_t>(i)]) continue;
        for (int c = 0; c < pred.dim(1); ++c) {
            p(r, c) = pred(i, c);
            a(r, c) = actual(i, c);
        }
        ++r;
    }

    EvalReport report;
    report.stat_names = stat_names;
    report.sample_count = static_cast<long>(kept) * pred.dim(1);
    report.rmse = rmse(p, a);
    report.mae = mae(p, a);
    report.mape = mape(p, a, mape_eps);
    report.corr = corr_fisher(p, a);

    for (int c = 0; c < p.dim(1); ++c) {
        Tensor pc({kept, 1}), ac({kept, 1});
        for (int i = 0; i < kept; ++i) {
            pc(i, 0) = p(i, c);
            ac(i, 0) = a(i, c);
        }
        report.stat_rmse.push_back(rmse(pc, ac));
        report.stat_mae.push_back(mae(pc, ac));
    }
    return report;
}

std::string EvalReport::to_csv() const {
    std::ostringstream out;
    out << "metric,statistic,value\n";
    out << "rmse,ALL," << csv::format_double(rmse) << "\n";
    out << "mae,ALL," << csv::format_double(mae) << "\n";
    out << "mape,ALL," << csv::format_double(mape) << "\n";
    out << "corr,ALL," << csv::format_double(corr) << "\n";
    out << "count,ALL," << sample_count << "\n";
    for (size_t c = 0; c < stat_names.size(); ++c) {
        out << "rmse," << stat_names[c] << "," << csv::format_double(stat_rmse[c]) << "\n";
        out << "mae," << stat_names[c] << "," << csv::format_double(stat_mae[c]) << "\n";
    }
    return out.str();
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << "overall: rmse=" << rmse << " mae=" << mae << " mape=" << mape << " corr=" << corr
        << " entries=" << sample_count << "\n";
    for (size_t c = 0; c < stat_names.size(); ++c)
        out << "  " << stat_names[c] << ": rmse=" << stat_rmse[c] << " mae=" << stat_mae[c]
            << "\n";
    return out.str();
}

}  // namespace courtcast::metrics
