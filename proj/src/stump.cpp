#include "srf/stump.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srf/rng.hpp"

namespace srf {

StumpFit fit_stump(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("fit_stump: length mismatch");
    if (xs.empty()) throw std::invalid_argument("fit_stump: empty sample");
    double x_sup = -std::numeric_limits<double>::infinity();
    double x_inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i] > 0.5)
            x_inf = std::min(x_inf, xs[i]);
        else
            x_sup = std::max(x_sup, xs[i]);
    }
    if (std::isinf(x_sup) || std::isinf(x_inf))
        throw std::invalid_argument("fit_stump: both classes must be present");
    return {x_sup + (x_inf - x_sup) / 2.0, x_sup, x_inf};
}

double laplace_unit_cdf(double t) {
    return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
}

SplitSimulationReport simulate_split_asymptotics(std::size_t n, double w, double b, std::size_t reps,
                                                 std::uint64_t seed) {
    if (n < 100) throw std::invalid_argument("simulate_split_asymptotics: n must be >= 100");
    if (reps < 500) throw std::invalid_argument("simulate_split_asymptotics: reps must be >= 500");
    if (!(w > 0.0)) throw std::invalid_argument("simulate_split_asymptotics: w must be > 0");

    SplitSimulationReport report;
    report.n = n;
    report.w = w;
    report.b = b;
    report.reps = reps;
    report.scaled_errors.resize(reps);

    for (std::size_t r = 0; r < reps; ++r) {
        // x_sup / x_inf need only a single pass; redraw single-class samples.
        for (std::uint64_t attempt = 0;; ++attempt) {
            Rng rng(derive_seed(seed, r, attempt));
            double x_sup = -std::numeric_limits<double>::infinity();
            double x_inf = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double x = rng.uniform(b - w, b + w);
                if (x > b)
                    x_inf = std::min(x_inf, x);
                else
                    x_sup = std::max(x_sup, x);
            }
            if (std::isinf(x_sup) || std::isinf(x_inf)) {
                ++report.degenerate_redraws;
                continue;
            }
            const double b_hat = x_sup + (x_inf - x_sup) / 2.0;
            report.scaled_errors[r] = static_cast<double>(n) * (b_hat - b) / w;
            break;
        }
    }

    double mean = 0.0;
    for (double e : report.scaled_errors) mean += e;
    mean /= static_cast<double>(reps);
    double ss = 0.0;
    for (double e : report.scaled_errors) ss += (e - mean) * (e - mean);
    report.mean = mean;
    report.variance = ss / static_cast<double>(reps - 1);

    std::vector<double> sorted = report.scaled_errors;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    const double inv = 1.0 / static_cast<double>(reps);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = laplace_unit_cdf(sorted[i]);
        ks = std::max(ks, std::abs(f - static_cast<double>(i) * inv));
        ks = std::max(ks, std::abs(f - static_cast<double>(i + 1) * inv));
    }
    report.ks_distance = ks;
    return report;
}

}  // namespace srf
