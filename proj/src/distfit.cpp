#include "courtcast/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace courtcast::dist {

namespace {

constexpr double kRejected = 1e30;  // likelihood value for invalid parameters
constexpr double kMinDof = 2.1;     // keeps the t distribution's variance finite

double sample_mean(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_var(const std::vector<double>& xs, double mean) {
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(xs.size());
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

int shape_count(const std::string& family) {
    if (family == "norm" || family == "exp") return 0;
    if (family == "t" || family == "gamma" || family == "genextreme") return 1;
    if (family == "beta") return 2;
    throw ConfigError("unknown distribution family '" + family + "'");
}

}  // namespace

const std::vector<std::string>& family_names() {
    static const std::vector<std::string> names = {"norm", "t", "exp", "beta", "gamma",
                                                   "genextreme"};
    return names;
}

Histogram histogram(const std::vector<double>& samples, int bins) {
    if (bins < 1) throw ConfigError("histogram needs at least 1 bin, got " + std::to_string(bins));
    if (samples.size() < 2) {
        throw Error("histogram needs at least 2 samples, got " + std::to_string(samples.size()));
    }
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) throw Error("histogram needs at least 2 distinct sample values");

    Histogram h;
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + width * b;
    h.edges[bins] = hi;  // exact upper edge regardless of rounding

    std::vector<long> counts(bins, 0);
    for (double x : samples) {
        int b = static_cast<int>((x - lo) / width);
        b = std::clamp(b, 0, bins - 1);  // the maximum lands in the last bin
        ++counts[b];
    }
    h.density.resize(bins);
    const double norm = 1.0 / (static_cast<double>(samples.size()) * width);
    for (int b = 0; b < bins; ++b) h.density[b] = counts[b] * norm;
    return h;
}

double pdf(const std::string& family, double x, double loc, double scale,
           const std::vector<double>& shape) {
    if (static_cast<int>(shape.size()) != shape_count(family)) {
        throw ConfigError("family '" + family + "' takes " + std::to_string(shape_count(family)) +
                          " shape parameters, got " + std::to_string(shape.size()));
    }
    if (!(scale > 0.0)) return 0.0;
    const double z = (x - loc) / scale;

    if (family == "norm") {
        return std::exp(-0.5 * z * z) / (scale * std::sqrt(2.0 * std::numbers::pi));
    }
    if (family == "t") {
        const double dof = shape[0];
        if (!(dof > 0.0)) return 0.0;
        const double log_pdf = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                               0.5 * std::log(dof * std::numbers::pi) -
                               0.5 * (dof + 1.0) * std::log1p(z * z / dof);
        return std::exp(log_pdf) / scale;
    }
    if (family == "exp") {
        if (z < 0.0) return 0.0;
        return std::exp(-z) / scale;
    }
    if (family == "beta") {
        const double a = shape[0];
        const double b = shape[1];
        if (!(a > 0.0) || !(b > 0.0)) return 0.0;
        if (z <= 0.0 || z >= 1.0) return 0.0;
        return std::exp((a - 1.0) * std::log(z) + (b - 1.0) * std::log1p(-z) - log_beta(a, b)) /
               scale;
    }
    if (family == "gamma") {
        const double a = shape[0];
        if (!(a > 0.0)) return 0.0;
        if (z <= 0.0) return 0.0;
        return std::exp((a - 1.0) * std::log(z) - z - std::lgamma(a)) / scale;
    }
    // genextreme, scipy sign convention: support requires 1 - c*z > 0.
    const double c = shape[0];
    if (std::abs(c) < 1e-9) {
        const double t = std::exp(-z);
        return t * std::exp(-t) / scale;
    }
    const double u = 1.0 - c * z;
    if (u <= 0.0) return 0.0;
    const double t = std::pow(u, 1.0 / c);
    return std::exp(-t) * std::pow(u, 1.0 / c - 1.0) / scale;
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, int max_iterations, double tol) {
    const int n = static_cast<int>(x0.size());
    if (n < 1) throw ConfigError("simplex needs at least one coordinate");

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (int i = 0; i < n; ++i) {
        // fminsearch-style initial spread: 5% of the coordinate, or a small
        // absolute step when it is zero.
        pts[i + 1][i] += (x0[i] != 0.0) ? 0.05 * x0[i] : 0.00025;
    }
    std::vector<double> fx(n + 1);
    for (int i = 0; i <= n; ++i) fx[i] = f(pts[i]);

    auto order = [&] {
        std::vector<int> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> f2(n + 1);
        for (int i = 0; i <= n; ++i) {
            p2[i] = pts[idx[i]];
            f2[i] = fx[idx[i]];
        }
        pts = std::move(p2);
        fx = std::move(f2);
    };

    SimplexResult result;
    int iter = 0;
    for (; iter < max_iterations; ++iter) {
        order();
        double spread = 0.0;
        for (int i = 1; i <= n; ++i) spread = std::max(spread, std::abs(fx[i] - fx[0]));
        if (spread < tol) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (int j = 0; j < n; ++j) centroid[j] /= n;

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (int j = 0; j < n; ++j) p[j] = centroid[j] + coef * (centroid[j] - pts[n][j]);
            return p;
        };

        const std::vector<double> reflected = blend(1.0);
        const double f_ref = f(reflected);
        if (f_ref < fx[0]) {
            const std::vector<double> expanded = blend(2.0);
            const double f_exp = f(expanded);
            if (f_exp < f_ref) {
                pts[n] = expanded;
                fx[n] = f_exp;
            } else {
                pts[n] = reflected;
                fx[n] = f_ref;
            }
            continue;
        }
        if (f_ref < fx[n - 1]) {
            pts[n] = reflected;
            fx[n] = f_ref;
            continue;
        }
        const bool outside = f_ref < fx[n];
        const std::vector<double> contracted = blend(outside ? 0.5 : -0.5);
        const double f_con = f(contracted);
        if (f_con < (outside ? f_ref : fx[n])) {
            pts[n] = contracted;
            fx[n] = f_con;
            continue;
        }
        for (int i = 1; i <= n; ++i) {  // shrink toward the best vertex
            for (int j = 0; j < n; ++j) pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
            fx[i] = f(pts[i]);
        }
    }
    order();
    result.x = pts[0];
    result.fx = fx[0];
    result.iterations = iter;
    return result;
}

namespace {

double nll(const std::string& family, const std::vector<double>& xs, double loc, double scale,
           const std::vector<double>& shape) {
    if (!(scale > 0.0) || !std::isfinite(loc) || !std::isfinite(scale)) return kRejected;
    for (double s : shape) {
        if (!std::isfinite(s)) return kRejected;
    }
    double acc = 0.0;
    for (double x : xs) {
        const double p = pdf(family, x, loc, scale, shape);
        if (!(p > 0.0) || !std::isfinite(p)) return kRejected;
        acc -= std::log(p);
    }
    return std::isfinite(acc) ? acc : kRejected;
}

double fit_rss(const Histogram& h, const FitResult& fit) {
    double rss = 0.0;
    for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
        const double center = 0.5 * (h.edges[b] + h.edges[b + 1]);
        const double d = pdf(fit.family, center, fit.loc, fit.scale, fit.shape) - h.density[b];
        rss += d * d;
    }
    return rss;
}

// Runs the simplex on the family NLL and unpacks the optimum via `unpack`.
FitResult simplex_fit(const std::vector<double>& xs, const Histogram& h,
                      const std::string& family, std::vector<double> init,
                      const std::function<FitResult(const std::vector<double>&)>& unpack) {
    const auto objective = [&](const std::vector<double>& p) {
        const FitResult f = unpack(p);
        return nll(family, xs, f.loc, f.scale, f.shape);
    };
    SimplexResult sr = nelder_mead(objective, std::move(init));
    FitResult fit = unpack(sr.x);
    fit.rss = fit_rss(h, fit);
    if (!sr.converged) {
        throw ConvergenceError("simplex did not converge for family '" + family + "' after " +
                                   std::to_string(sr.iterations) + " iterations",
                               fit);
    }
    if (objective(sr.x) >= kRejected) {
        throw Error("simplex for family '" + family + "' ended on invalid parameters");
    }
    return fit;
}

}  // namespace

FitResult fit_family(const std::vector<double>& samples, const std::string& family, int bins) {
    shape_count(family);  // validates the name early
    if (samples.size() < 30) {
        throw Error("fitting needs at least 30 samples, got " + std::to_string(samples.size()));
    }
    const Histogram h = histogram(samples, bins);
    const double mean = sample_mean(samples);
    const double var = sample_var(samples, mean);
    const double stdev = std::sqrt(var);
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double range = hi - lo;

    if (family == "norm") {
        FitResult fit{"norm", mean, stdev, {}, 0.0};
        if (!(fit.scale > 0.0)) throw Error("norm fit needs non-zero variance");
        fit.rss = fit_rss(h, fit);
        return fit;
    }
    if (family == "exp") {
        FitResult fit{"exp", lo, mean - lo, {}, 0.0};
        if (!(fit.scale > 0.0)) throw Error("exp fit needs samples above the minimum");
        fit.rss = fit_rss(h, fit);
        return fit;
    }
    if (family == "t") {
        const double dof0 = 10.0;
        const std::vector<double> init = {dof0, mean, stdev * std::sqrt((dof0 - 2.0) / dof0)};
        return simplex_fit(samples, h, family, init, [](const std::vector<double>& p) {
            return FitResult{"t", p[1], p[2], {std::max(p[0], kMinDof)}, 0.0};
        });
    }
    if (family == "beta") {
        // Rescale onto (0,1) with a small margin so the endpoints stay inside
        // the open support; only the two shape parameters are optimized.
        const double margin = 1e-6 * range;
        const double b_loc = lo - margin;
        const double b_scale = range + 2.0 * margin;
        double zm = 0.0;
        double zv = 0.0;
        for (double x : samples) zm += (x - b_loc) / b_scale;
        zm /= static_cast<double>(samples.size());
        for (double x : samples) {
            const double z = (x - b_loc) / b_scale;
            zv += (z - zm) * (z - zm);
        }
        zv /= static_cast<double>(samples.size());
        const double common = std::max(zm * (1.0 - zm) / std::max(zv, 1e-12) - 1.0, 0.1);
        const std::vector<double> init = {std::max(zm * common, 0.1),
                                          std::max((1.0 - zm) * common, 0.1)};
        return simplex_fit(samples, h, family, init, [=](const std::vector<double>& p) {
            return FitResult{"beta", b_loc, b_scale, {p[0], p[1]}, 0.0};
        });
    }
    if (family == "gamma") {
        const double loc0 = lo - 0.01 * range;
        const double shifted_mean = mean - loc0;
        const double a0 = std::max(shifted_mean * shifted_mean / std::max(var, 1e-12), 0.1);
        const double scale0 = std::max(var / std::max(shifted_mean, 1e-12), 1e-6);
        const std::vector<double> init = {a0, loc0, scale0};
        return simplex_fit(samples, h, family, init, [](const std::vector<double>& p) {
            return FitResult{"gamma", p[1], p[2], {p[0]}, 0.0};
        });
    }
    // genextreme: Gumbel method-of-moments start with a small shape.
    const double scale0 = std::max(stdev * std::sqrt(6.0) / std::numbers::pi, 1e-6);
    const double loc0 = mean - std::numbers::egamma * scale0;
    const std::vector<double> init = {0.1, loc0, scale0};
    return simplex_fit(samples, h, family, init, [](const std::vector<double>& p) {
        return FitResult{"genextreme", p[1], p[2], {p[0]}, 0.0};
    });
}

FitResult best_fit(const std::vector<double>& samples, int bins,
                   std::vector<std::string>* warnings) {
    FitResult best;
    bool have = false;
    for (const std::string& family : family_names()) {
        try {
            FitResult fit = fit_family(samples, family, bins);
            if (!have || fit.rss < best.rss) {
                best = std::move(fit);
                have = true;
            }
        } catch (const Error& e) {
            if (warnings) warnings->push_back("family " + family + " skipped: " + e.what());
        }
    }
    if (!have) throw Error("no distribution family could be fitted");
    return best;
}

}  // namespace courtcast::dist
