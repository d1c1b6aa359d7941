#include "srf/smooth.hpp"

#include <cmath>
#include <stdexcept>

namespace srf {

namespace {

void check(const TreeSmoother& s) {
    if (s.tree == nullptr) throw std::invalid_argument("smoother: no tree attached");
    validate(s.kernel);
    if (!std::isfinite(s.beta0) || !std::isfinite(s.beta1))
        throw std::invalid_argument("smoother: calibration parameters must be finite");
}

}  // namespace

double smoothed_predict(const TreeSmoother& s, std::span<const double> x0) {
    check(s);
    double acc = 0.0;
    for (const LeafRegion& leaf : s.tree->leaves)
        acc += leaf.constant * region_probability(s.kernel, leaf, x0);
    return s.beta1 * acc + s.beta0;
}

double smoothed_variance(const TreeSmoother& s, std::span<const double> x0) {
    check(s);
    double mean = 0.0, second = 0.0;
    for (const LeafRegion& leaf : s.tree->leaves) {
        const double p = region_probability(s.kernel, leaf, x0);
        mean += leaf.constant * p;
        second += leaf.constant * leaf.constant * p;
    }
    const double var = second - mean * mean;
    return s.beta1 * s.beta1 * (var > 0.0 ? var : 0.0);
}

double smoothed_derivative(const TreeSmoother& s, std::span<const double> x0, std::size_t dim) {
    check(s);
    if (s.kernel.family != KernelFamily::gaussian)
        throw std::invalid_argument("smoothed_derivative: only the gaussian kernel is differentiable here");
    if (dim >= s.tree->dim) throw std::invalid_argument("smoothed_derivative: dimension out of range");

    double acc = 0.0;
    for (const LeafRegion& leaf : s.tree->leaves) {
        double cross = 1.0;
        for (std::size_t d = 0; d < x0.size(); ++d) {
            if (d == dim) continue;
            const double f =
                kernel_cdf(s.kernel, leaf.upper[d], x0[d]) - kernel_cdf(s.kernel, leaf.lower[d], x0[d]);
            cross *= f > 0.0 ? f : 0.0;
        }
        const double edge = gaussian_pdf(leaf.lower[dim], x0[dim], s.kernel.lambda) -
                            gaussian_pdf(leaf.upper[dim], x0[dim], s.kernel.lambda);
        acc += leaf.constant * cross * edge;
    }
    return s.beta1 * acc;
}

}  // namespace srf
