#pragma once

#include <functional>
#include <string>
#include <vector>

#include "courtcast/error.hpp"

namespace courtcast::dist {

// The six candidate families, parameterized the way scipy.stats does it:
// every family has loc/scale, plus family-specific shape parameters
// (t: dof; beta: a,b; gamma: a; genextreme: c).
const std::vector<std::string>& family_names();

struct FitResult {
    std::string family;
    double loc = 0.0;
    double scale = 1.0;
    std::vector<double> shape;
    double rss = 0.0;
};

// Thrown when the simplex runs out of iterations; carries the best point
// reached so callers can decide whether it is usable.
struct ConvergenceError : Error {
    FitResult best;
    ConvergenceError(const std::string& message, FitResult best_so_far)
        : Error(message), best(std::move(best_so_far)) {}
};

struct Histogram {
    std::vector<double> edges;    // bins + 1, equal width over [min, max]
    std::vector<double> density;  // bins entries, integrates to 1
};

// Equal-width density histogram; requires at least two distinct samples.
Histogram histogram(const std::vector<double>& samples, int bins);

// Density of one family at x. Returns 0 outside the support; throws
// ConfigError for an unknown family or a wrong shape-parameter count.
double pdf(const std::string& family, double x, double loc, double scale,
           const std::vector<double>& shape);

// Derivative-free simplex minimizer (Nelder-Mead with the standard
// reflection/expansion/contraction/shrink coefficients 1, 2, 0.5, 0.5).
struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    bool converged = false;
    int iterations = 0;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, int max_iterations = 2000, double tol = 1e-10);

// Maximum-likelihood fit of one family (closed form for norm and exp,
// simplex on the negative log-likelihood otherwise), scored by the residual
// sum of squares between the fitted density at bin centers and the density
// histogram. Requires at least 30 samples.
FitResult fit_family(const std::vector<double>& samples, const std::string& family,
                     int bins = 40);

// Fits all six families and returns the smallest-RSS result. Families that
// fail are skipped, with a note appended to `warnings` when provided; all
// failing is an error.
FitResult best_fit(const std::vector<double>& samples, int bins = 40,
                   std::vector<std::string>* warnings = nullptr);

}  // namespace courtcast::dist
