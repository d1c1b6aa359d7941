#include <doctest.h>

#include <numbers>

#include "srf/kernel.hpp"
#include "test_util.hpp"

using namespace srf;
using namespace srf::testing;

TEST_CASE("gaussian cdf basics") {
    const KernelSpec k{KernelFamily::gaussian, 1.0};
    CHECK(kernel_cdf(k, 0.7, 0.7) == 0.5);
    CHECK(kernel_cdf(k, kInf, 0.0) == 1.0);
    CHECK(kernel_cdf(k, -kInf, 0.0) == 0.0);
    CHECK(kernel_cdf(KernelSpec{KernelFamily::gaussian, 3.5}, -2.0, -2.0) == 0.5);

    // Monotone in value.
    double prev = 0.0;
    for (double v = -6.0; v <= 6.0; v += 0.05) {
        const double c = kernel_cdf(k, v, 0.0);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("gaussian cdf matches adaptive quadrature of the density") {
    const KernelSpec k{KernelFamily::gaussian, 1.0};
    const auto density = [](double z) { return gaussian_pdf(z, 0.0, 1.0); };
    // Independent oracle: integrate the density from far in the left tail.
    const double oracle = adaptive_simpson(density, -12.0, 1.96, 1e-12);
    CHECK(oracle == doctest::Approx(0.97500).epsilon(1e-5));
    CHECK(kernel_cdf(k, 1.96, 0.0) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(kernel_cdf(k, 1.96, 0.0) == doctest::Approx(0.97500).epsilon(1e-5));

    const KernelSpec wide{KernelFamily::gaussian, 2.5};
    const auto wide_density = [](double z) { return gaussian_pdf(z, 0.5, 2.5); };
    CHECK(kernel_cdf(wide, 1.7, 0.5) ==
          doctest::Approx(adaptive_simpson(wide_density, -30.0, 1.7, 1e-12)).epsilon(1e-9));
}

TEST_CASE("laplace cdf closed form") {
    const KernelSpec k{KernelFamily::laplace, 2.0};
    CHECK(kernel_cdf(k, 1.0, 1.0) == 0.5);
    CHECK(kernel_cdf(k, kInf, 1.0) == 1.0);
    CHECK(kernel_cdf(k, -kInf, 1.0) == 0.0);
    CHECK(kernel_cdf(k, 3.0, 1.0) == doctest::Approx(1.0 - 0.5 * std::exp(-1.0)));
    CHECK(kernel_cdf(k, -1.0, 1.0) == doctest::Approx(0.5 * std::exp(-1.0)));
}

TEST_CASE("region probabilities of simple boxes") {
    const KernelSpec k{KernelFamily::gaussian, 1.0};
    const LeafRegion everything{{-kInf, -kInf}, {kInf, kInf}, 0.0};
    CHECK(region_probability(k, everything, std::vector<double>{0.3, -5.0}) == 1.0);

    const LeafRegion half{{0.0}, {kInf}, 0.0};
    CHECK(region_probability(k, half, std::vector<double>{0.0}) == 0.5);

    const LeafRegion quarter{{0.0, 0.0}, {kInf, kInf}, 0.0};
    CHECK(region_probability(k, quarter, std::vector<double>{0.0, 0.0}) == 0.25);
}

TEST_CASE("region probabilities sum to one over a fitted tree's partition") {
    const FittedTree tree = random_fitted_tree(3, 250, 2, 4);
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<double> x0{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        for (double lambda : {0.05, 0.7, 3.0}) {
            const auto probs =
                region_probabilities(KernelSpec{KernelFamily::gaussian, lambda}, tree.leaves, x0);
            double sum = 0.0;
            for (double p : probs) sum += p;
            CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("vanishing bandwidth concentrates all mass on the containing region") {
    const FittedTree tree = random_fitted_tree(4, 200, 1, 5);
    Rng rng(5);
    std::vector<double> x0{0.0};
    do {
        x0[0] = rng.uniform(-2.0, 2.0);
    } while (distance_to_boundaries(tree, x0) < 0.05);

    const auto probs = region_probabilities(KernelSpec{KernelFamily::gaussian, 1e-12}, tree.leaves, x0);
    const std::size_t inside = tree.leaf_index_of(x0);
    for (std::size_t i = 0; i < probs.size(); ++i) CHECK(probs[i] == (i == inside ? 1.0 : 0.0));
}

TEST_CASE("region probabilities match Monte-Carlo frequencies") {
    const FittedTree tree = random_fitted_tree(6, 60, 2, 8);
    const KernelSpec k{KernelFamily::gaussian, 0.7};
    const std::vector<double> x0{0.4, -0.2};
    const auto probs = region_probabilities(k, tree.leaves, x0);

    const std::size_t draws = 1000000;
    std::vector<std::size_t> hits(tree.leaves.size(), 0);
    Rng rng(8);
    std::vector<double> z(2);
    for (std::size_t i = 0; i < draws; ++i) {
        kernel_sample(k, x0, rng, z);
        ++hits[tree.leaf_index_of(z)];
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double freq = static_cast<double>(hits[i]) / static_cast<double>(draws);
        const double se = std::sqrt(std::max(probs[i] * (1.0 - probs[i]), 1e-12) /
                                    static_cast<double>(draws));
        CHECK(std::abs(freq - probs[i]) <= 3.0 * se + 1e-9);
    }
}

TEST_CASE("laplace region probabilities also match Monte Carlo") {
    const FittedTree tree = random_fitted_tree(9, 80, 1, 10);
    const KernelSpec k{KernelFamily::laplace, 0.5};
    const std::vector<double> x0{0.1};
    const auto probs = region_probabilities(k, tree.leaves, x0);

    const std::size_t draws = 400000;
    std::vector<std::size_t> hits(tree.leaves.size(), 0);
    Rng rng(10);
    std::vector<double> z(1);
    for (std::size_t i = 0; i < draws; ++i) {
        kernel_sample(k, x0, rng, z);
        ++hits[tree.leaf_index_of(z)];
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double freq = static_cast<double>(hits[i]) / static_cast<double>(draws);
        const double se = std::sqrt(std::max(probs[i] * (1.0 - probs[i]), 1e-12) /
                                    static_cast<double>(draws));
        CHECK(std::abs(freq - probs[i]) <= 3.5 * se + 1e-9);
    }
}

TEST_CASE("enlarging a box never decreases its probability") {
    Rng rng(12);
    const KernelSpec k{KernelFamily::gaussian, 0.8};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t p = 1 + rng.uniform_index(3);
        LeafRegion box;
        std::vector<double> x0;
        for (std::size_t j = 0; j < p; ++j) {
            const double a = rng.uniform(-2.0, 2.0);
            box.lower.push_back(a);
            box.upper.push_back(a + rng.uniform(0.0, 2.0));
            x0.push_back(rng.uniform(-2.0, 2.0));
        }
        const double before = region_probability(k, box, x0);
        LeafRegion larger = box;
        const std::size_t j = rng.uniform_index(p);
        larger.lower[j] -= rng.uniform(0.0, 1.0);
        larger.upper[j] += rng.uniform(0.0, 1.0);
        CHECK(region_probability(k, larger, x0) >= before);
    }
}

TEST_CASE("translating the tree equals translating the query point") {
    Rng rng(13);
    for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
        const FittedTree tree = random_fitted_tree(seed, 150, 2, 4);
        for (int trial = 0; trial < 20; ++trial) {
            const std::vector<double> offset{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            const FittedTree moved = translate_tree(tree, offset);
            const std::vector<double> x0{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
            const std::vector<double> shifted{x0[0] - offset[0], x0[1] - offset[1]};
            CHECK(tree_predict_raw(tree, shifted) == tree_predict_raw(moved, x0));
        }
    }
}

TEST_CASE("non-partition region lists are rejected") {
    const std::vector<LeafRegion> overlapping{LeafRegion{{-kInf}, {1.0}, 0.0},
                                              LeafRegion{{-kInf}, {kInf}, 1.0}};
    CHECK_THROWS_AS(region_probabilities(KernelSpec{KernelFamily::gaussian, 1.0}, overlapping,
                                         std::vector<double>{0.0}),
                    std::runtime_error);
}

TEST_CASE("kernel spec validation") {
    CHECK_THROWS_AS(validate(KernelSpec{KernelFamily::gaussian, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(KernelSpec{KernelFamily::gaussian, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(KernelSpec{KernelFamily::gaussian, kInf}), std::invalid_argument);
    CHECK_THROWS_AS(kernel_family_from_string("triangle"), std::invalid_argument);
    CHECK(kernel_family_from_string("gaussian") == KernelFamily::gaussian);
    CHECK(to_string(KernelFamily::laplace) == "laplace");
}
