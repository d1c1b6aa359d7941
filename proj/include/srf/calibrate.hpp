#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "srf/dataset.hpp"
#include "srf/tree.hpp"

namespace srf {

/// Log-spaced grid plus golden-section refinement around the best grid point.
struct LambdaSearchSpec {
    double lambda_min = 1e-3;
    double lambda_max = 10.0;
    std::size_t grid_size = 25;
    double refine_rel_tol = 1e-3;
};

/// Scale-aware default range: [1e-3 s, 10 s] where s is the median
/// per-feature standard deviation of the training features.
LambdaSearchSpec default_lambda_search(const Dataset& d);

struct OlsCoefficients {
    double beta1 = 1.0;
    double beta0 = 0.0;
};

/// Least-squares affine fit of targets on predictions. Zero-variance
/// predictions give the minimum-norm limit (0, mean(targets)).
OlsCoefficients fit_beta_ols(std::span<const double> predictions, std::span<const double> targets);

struct LineSearchResult {
    double lambda = 0.0;
    double value = 0.0;
};

/// Minimizes `objective` over the log-spaced grid, then golden-section
/// refines between the neighbours of the best grid point. Returns the best
/// evaluated point; deterministic. Throws std::runtime_error when the
/// objective is non-finite at every grid point.
LineSearchResult lambda_line_search(const std::function<double(double)>& objective,
                                    const LambdaSearchSpec& spec);

enum class CalibrationMode { global, local };

std::string to_string(CalibrationMode mode);
CalibrationMode calibration_mode_from_string(const std::string& name);

struct TreeCalibration {
    double lambda = 1.0;
    double beta0 = 0.0;
    double beta1 = 1.0;
};

struct CalibrationResult {
    CalibrationMode mode = CalibrationMode::global;
    std::vector<TreeCalibration> per_tree;  // identical entries when mode == global
    double oob_rss = 0.0;                   // achieved objective
};

/// One shared (lambda, beta0, beta1) for the whole forest, minimizing the
/// pooled out-of-bag residual sum of squares. For each candidate lambda the
/// optimal betas are the closed-form least-squares fit over all
/// (tree, OOB row) pairs. Throws std::runtime_error when a tree has no
/// out-of-bag rows.
CalibrationResult calibrate_global(std::span<const FittedTree> forest, const Dataset& data,
                                   const LambdaSearchSpec& search);

/// Per-tree (lambda_t, beta0_t, beta1_t), each minimizing that tree's own
/// out-of-bag residual sum of squares; the reported objective is the sum of
/// the per-tree optima. Per-tree calibrations are independent.
CalibrationResult calibrate_local(std::span<const FittedTree> forest, const Dataset& data,
                                  const LambdaSearchSpec& search);

}  // namespace srf
