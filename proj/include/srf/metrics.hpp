#pragma once

#include <span>

namespace srf {

/// Mean squared residual. Throws std::invalid_argument on length mismatch or
/// empty input.
double mse(std::span<const double> predictions, std::span<const double> targets);

/// Negative log density of y under a Gaussian with the given mean and
/// variance: 0.5 log(2 pi variance) + (y - mean)^2 / (2 variance).
/// Throws std::invalid_argument when variance <= 0.
double gaussian_log_loss(double y, double mean, double variance);

/// Percentage improvement of risk of a candidate over a baseline:
/// (baseline - candidate) / baseline * 100. Zero means equivalent risk.
/// Throws std::invalid_argument when the baseline risk is zero.
double pi_risk(double risk_candidate, double risk_baseline);

// Aggregation helpers for result tables.
double mean_of(std::span<const double> values);
double standard_error(std::span<const double> values);          // sd / sqrt(n)
double median_of(std::span<const double> values);
double median_standard_error(std::span<const double> values);   // 1.2533 sd / sqrt(n)

}  // namespace srf
