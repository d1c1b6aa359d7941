#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace srf {

/// An in-memory regression dataset: n rows of p finite features plus a finite
/// target per row. Immutable by convention once built; safe to share
/// read-only across threads.
struct Dataset {
    std::size_t n = 0;  // rows
    std::size_t p = 0;  // features
    std::vector<double> x;  // row-major, n * p
    std::vector<double> y;  // length n
    std::vector<std::string> feature_names;  // length p
    std::string target_name = "y";

    double at(std::size_t i, std::size_t j) const { return x[i * p + j]; }
    std::span<const double> row(std::size_t i) const { return {x.data() + i * p, p}; }
};

/// Throws std::invalid_argument when the Dataset invariants are violated
/// (empty data, size mismatches, non-finite values).
void validate(const Dataset& d);

/// Reads a comma-separated UTF-8 file with a header row; every cell below the
/// header must be numeric and finite. The target column is removed from the
/// features. Row order is preserved.
Dataset load_csv(const std::string& path, const std::string& target_column);
Dataset load_csv(const std::string& path, std::size_t target_index);

/// Writes header + rows; doubles are printed with round-trip precision so
/// load_csv(save_csv(d)) reproduces d exactly.
void save_csv(const Dataset& d, const std::string& path);

/// New dataset holding the given rows (repeats allowed), in the given order.
Dataset subset(const Dataset& d, std::span<const std::size_t> rows);

struct BootstrapSplit {
    std::vector<std::size_t> in_bag;  // size n, sampled with replacement, draw order
    std::vector<std::size_t> oob;     // ascending; rows absent from in_bag
};

/// Standard bootstrap: n draws with replacement; oob is the complement of the
/// distinct drawn indices. Deterministic given (d, seed).
BootstrapSplit bootstrap(const Dataset& d, std::uint64_t seed);

/// 1-D step data: features uniform on (b-w, b+w), targets I(x > b) plus
/// centred Gaussian noise with standard deviation noise_sd.
Dataset make_step_data(std::size_t n, double b, double w, double noise_sd, std::uint64_t seed);

/// 1-D data with non-homogeneous smoothness: flat at zero on (-1, 0), a sine
/// with 2.5 periods on [0, 1), plus Gaussian noise. Ground truth available as
/// hetero_truth for test oracles.
Dataset make_hetero_data(std::size_t n, std::uint64_t seed, double noise_sd = 0.1);

/// Closed-form target function behind make_hetero_data:
///   g(x) = 0 for x < 0,  g(x) = sin(5*pi*x) for x >= 0.
double hetero_truth(double x);

}  // namespace srf
