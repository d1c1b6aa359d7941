#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "srf/calibrate.hpp"
#include "srf/dataset.hpp"
#include "srf/kernel.hpp"
#include "srf/smooth.hpp"
#include "srf/tree.hpp"

namespace srf {

/// How the constant noise term of the predictive variance is estimated:
/// in_sample uses smoothed-forest residuals on all training rows;
/// out_of_bag averages, per row, the trees for which the row was held out.
enum class NoiseMode { in_sample, out_of_bag };

std::string to_string(NoiseMode mode);
NoiseMode noise_mode_from_string(const std::string& name);

/// Bootstrap forest: each tree is fitted on its own bootstrap sample with
/// feature subsampling, out-of-bag rows recorded. Deterministic given seed
/// (per-tree streams come from derive_seed(seed, t, ...)).
std::vector<FittedTree> fit_forest(const Dataset& data, std::size_t n_trees, const TreeParams& params,
                                   std::uint64_t seed);

struct ModelMetadata {
    std::size_t n_trees = 0;
    TreeParams tree_params;
    std::uint64_t seed = 0;
    CalibrationMode calibration = CalibrationMode::global;
    NoiseMode noise = NoiseMode::in_sample;
    std::vector<std::string> feature_names;
    std::string target_name = "y";
};

/// A calibrated smoothed forest: the fitted trees, one (lambda, beta0, beta1)
/// triple per tree, and the precomputed constant noise term. Immutable once
/// built; prediction entry points are const and thread-safe.
struct SmoothedForestModel {
    std::vector<FittedTree> trees;
    std::vector<TreeCalibration> smoothers;  // one per tree
    KernelFamily kernel_family = KernelFamily::gaussian;
    double noise_variance = 0.0;
    ModelMetadata meta;

    TreeSmoother smoother(std::size_t t) const {
        return TreeSmoother{&trees[t], {kernel_family, smoothers[t].lambda}, smoothers[t].beta0,
                            smoothers[t].beta1};
    }
};

/// Assembles a model from fitted trees and a calibration result, computing
/// the noise term on the training data. Throws std::invalid_argument when
/// sizes disagree.
SmoothedForestModel build_smoothed_model(std::vector<FittedTree> trees, const CalibrationResult& calibration,
                                         const Dataset& train, NoiseMode noise_mode, ModelMetadata meta);

/// Average of the per-tree smoothed predictions; fixed summation order.
double forest_predict_smoothed(const SmoothedForestModel& model, std::span<const double> x0);

/// Predictive mean and the three-term variance decomposition:
/// variance == intra + inter + noise holds as stored, exactly.
struct PredictiveDistribution {
    double mean = 0.0;
    double variance = 0.0;
    double intra = 0.0;  // mean per-tree kernel-induced variance
    double inter = 0.0;  // population variance of per-tree means
    double noise = 0.0;  // constant in x0
};

PredictiveDistribution forest_uncertainty(const SmoothedForestModel& model, std::span<const double> x0);

struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0;
};

/// Plain random-forest baseline: mean of raw tree predictions and the
/// inter-tree population variance (no noise term; callers add one when
/// needed for log-loss comparisons).
MeanVariance rf_baseline_predict(std::span<const FittedTree> trees, std::span<const double> x0);

/// Noise term for the raw-forest baseline under the same convention as the
/// smoothed model: mean squared residual of the forest mean, in-sample or
/// out-of-bag.
double rf_baseline_noise_variance(std::span<const FittedTree> trees, const Dataset& train, NoiseMode mode);

/// Variances below this are lifted to it before log-loss evaluation, keeping
/// -log p finite when an ensemble degenerates to identical predictions.
inline constexpr double kVarianceFloor = 1e-12;

// Versioned model file (structured text, JSON). load_model throws
// std::runtime_error on malformed files and on files written by a newer
// format version, naming both versions.
void save_model(const SmoothedForestModel& model, const std::string& path);
SmoothedForestModel load_model(const std::string& path);

}  // namespace srf
