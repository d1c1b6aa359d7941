#include "srf/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace srf {

std::string to_string(KernelFamily family) {
    return family == KernelFamily::gaussian ? "gaussian" : "laplace";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "gaussian") return KernelFamily::gaussian;
    if (name == "laplace") return KernelFamily::laplace;
    throw std::invalid_argument("unknown kernel family: '" + name + "'");
}

void validate(const KernelSpec& kernel) {
    if (!(kernel.lambda > 0.0) || !std::isfinite(kernel.lambda))
        throw std::invalid_argument("kernel: lambda must be positive and finite");
}

double kernel_cdf(const KernelSpec& kernel, double value, double center) {
    if (std::isinf(value)) return value > 0.0 ? 1.0 : 0.0;
    const double z = (value - center) / kernel.lambda;
    if (kernel.family == KernelFamily::gaussian) {
        // erfc underflows past |z| ~ 38.5; saturate to the exact limit values.
        if (z <= -38.5) return 0.0;
        if (z >= 38.5) return 1.0;
        return 0.5 * std::erfc(-z / std::numbers::sqrt2);
    }
    return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double gaussian_pdf(double value, double center, double lambda) {
    if (std::isinf(value)) return 0.0;
    const double z = (value - center) / lambda;
    return std::exp(-0.5 * z * z) / (lambda * std::sqrt(2.0 * std::numbers::pi));
}

double region_probability(const KernelSpec& kernel, const LeafRegion& region, std::span<const double> x0) {
    double prob = 1.0;
    for (std::size_t j = 0; j < x0.size(); ++j) {
        const double f =
            kernel_cdf(kernel, region.upper[j], x0[j]) - kernel_cdf(kernel, region.lower[j], x0[j]);
        prob *= f > 0.0 ? f : 0.0;
    }
    return prob;
}

std::vector<double> region_probabilities(const KernelSpec& kernel, std::span<const LeafRegion> regions,
                                         std::span<const double> x0) {
    std::vector<double> probs(regions.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        probs[i] = region_probability(kernel, regions[i], x0);
        sum += probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::runtime_error("region_probabilities: regions are not a partition (probabilities sum to " +
                                 std::to_string(sum) + ")");
    return probs;
}

void kernel_sample(const KernelSpec& kernel, std::span<const double> x0, Rng& rng, std::span<double> out) {
    for (std::size_t j = 0; j < x0.size(); ++j) {
        if (kernel.family == KernelFamily::gaussian) {
            out[j] = x0[j] + kernel.lambda * rng.gaussian();
        } else {
            // Laplace component: exponential magnitude with a random sign.
            const double mag = -std::log(1.0 - rng.uniform01());
            const bool negative = (rng.next_u64() & 1) != 0;
            out[j] = x0[j] + kernel.lambda * (negative ? -mag : mag);
        }
    }
}

}  // namespace srf
