#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace srf {

/// One-split tree fitted to separable 0/1 data: the breakpoint estimate is
/// the midpoint of the largest 0-labelled and smallest 1-labelled points.
struct StumpFit {
    double b_hat = 0.0;
    double x_sup = 0.0;  // largest x with y == 0
    double x_inf = 0.0;  // smallest x with y == 1
};

/// Midpoint breakpoint estimator. Expects noiseless one-dimensional data
/// with both classes present (throws std::invalid_argument otherwise);
/// coincides with the exhaustive least-squares stump on separable data.
StumpFit fit_stump(std::span<const double> xs, std::span<const double> ys);

/// Laplace(0, 1) CDF: 1/2 + sign(t) (1 - exp(-|t|)) / 2.
double laplace_unit_cdf(double t);

struct SplitSimulationReport {
    std::size_t n = 0;
    double w = 0.0;
    double b = 0.0;
    std::size_t reps = 0;
    double mean = 0.0;       // of the scaled errors e_r = n (b_hat - b) / w
    double variance = 0.0;   // unbiased sample variance of e_r
    double ks_distance = 0.0;  // to the Laplace(0, 1) CDF
    std::size_t degenerate_redraws = 0;  // single-class samples replaced
    std::vector<double> scaled_errors;   // all e_r, for histograms
};

/// Draws `reps` noiseless step datasets (n design points uniform on
/// (b-w, b+w), targets I(x > b)), fits the midpoint stump to each, and
/// summarizes the scaled errors n (b_hat - b) / w against their Laplace(0, 1)
/// large-sample law. Single-class draws are redrawn and counted.
SplitSimulationReport simulate_split_asymptotics(std::size_t n, double w, double b, std::size_t reps,
                                                 std::uint64_t seed);

}  // namespace srf
