#include "srf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace srf {

double mse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) throw std::invalid_argument("mse: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("mse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double r = predictions[i] - targets[i];
        acc += r * r;
    }
    return acc / static_cast<double>(predictions.size());
}

double gaussian_log_loss(double y, double mean, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian_log_loss: variance must be > 0");
    const double r = y - mean;
    return 0.5 * std::log(2.0 * std::numbers::pi * variance) + r * r / (2.0 * variance);
}

double pi_risk(double risk_candidate, double risk_baseline) {
    if (risk_baseline == 0.0) throw std::invalid_argument("pi_risk: baseline risk is zero");
    return (risk_baseline - risk_candidate) / risk_baseline * 100.0;
}

double mean_of(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean_of: empty input");
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

namespace {

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

double standard_error(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("standard_error: empty input");
    return sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
}

double median_of(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("median_of: empty input");
    std::vector<double> copy(values.begin(), values.end());
    std::sort(copy.begin(), copy.end());
    const std::size_t m = copy.size() / 2;
    return copy.size() % 2 == 1 ? copy[m] : 0.5 * (copy[m - 1] + copy[m]);
}

double median_standard_error(std::span<const double> values) {
    // Normal-approximation standard error of the sample median.
    return 1.2533141373155003 * standard_error(values);
}

}  // namespace srf
