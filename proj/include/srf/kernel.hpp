#pragma once

#include <span>
#include <string>
#include <vector>

#include "srf/rng.hpp"
#include "srf/tree.hpp"

namespace srf {

enum class KernelFamily { gaussian, laplace };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Spherical kernel: independent identical components with scale lambda.
/// Gaussian components have standard deviation lambda; Laplace components
/// have scale lambda.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    double lambda = 1.0;  // > 0, finite
};

void validate(const KernelSpec& kernel);

/// Component CDF at `value` for the kernel centred at `center`.
/// Infinite values map to exactly 0 / 1 before any arithmetic.
double kernel_cdf(const KernelSpec& kernel, double value, double center);

/// Gaussian density with mean `center` and standard deviation `lambda`,
/// evaluated at `value`; infinite `value` gives exactly 0.
double gaussian_pdf(double value, double center, double lambda);

/// P(z in region) for z kernel-distributed around x0: the coordinate-wise
/// product of CDF differences over the box bounds. O(p).
double region_probability(const KernelSpec& kernel, const LeafRegion& region, std::span<const double> x0);

/// Per-region probabilities for a full partition. Throws std::runtime_error
/// when the probabilities do not sum to 1 within 1e-6 (the regions then do
/// not tile the space).
std::vector<double> region_probabilities(const KernelSpec& kernel, std::span<const LeafRegion> regions,
                                         std::span<const double> x0);

/// One draw of z ~ kernel centred at x0, written into out (used by the
/// Monte-Carlo test oracles; independent of the CDF-based probability path).
void kernel_sample(const KernelSpec& kernel, std::span<const double> x0, Rng& rng, std::span<double> out);

}  // namespace srf
