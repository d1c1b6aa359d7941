#pragma once

#include <span>

#include "srf/kernel.hpp"
#include "srf/tree.hpp"

namespace srf {

/// A tree paired with its smoothing kernel and affine calibration. Does not
/// own the tree; the referenced FittedTree must outlive the smoother.
/// Predictions are pure functions of (tree, kernel, beta), freely parallel.
struct TreeSmoother {
    const FittedTree* tree = nullptr;
    KernelSpec kernel;
    double beta0 = 0.0;
    double beta1 = 1.0;
};

/// Kernel-weighted average of the leaf constants, affinely calibrated:
///   beta1 * sum_i c_i P(z in D_i | x0, lambda) + beta0.
/// Cost O(k p) for k leaves in p dimensions.
double smoothed_predict(const TreeSmoother& s, std::span<const double> x0);

/// Kernel-induced variance of the calibrated piecewise-constant output:
///   beta1^2 * (sum_i c_i^2 P_i - (sum_i c_i P_i)^2),
/// clamped at zero against floating-point cancellation.
double smoothed_variance(const TreeSmoother& s, std::span<const double> x0);

/// Partial derivative of smoothed_predict with respect to x0[dim]. Gaussian
/// kernels only; throws std::invalid_argument otherwise. Infinite box bounds
/// contribute zero to their density term.
double smoothed_derivative(const TreeSmoother& s, std::span<const double> x0, std::size_t dim);

}  // namespace srf
