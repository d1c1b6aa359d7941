#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "srf/calibrate.hpp"
#include "srf/ensemble.hpp"
#include "srf/smooth.hpp"
#include "test_util.hpp"

using namespace srf;
using namespace srf::testing;

namespace {

std::vector<double> log_grid(const LambdaSearchSpec& spec) {
    std::vector<double> grid(spec.grid_size);
    const double u_lo = std::log(spec.lambda_min);
    const double step = (std::log(spec.lambda_max) - u_lo) / static_cast<double>(spec.grid_size - 1);
    for (std::size_t i = 0; i < spec.grid_size; ++i) grid[i] = std::exp(u_lo + static_cast<double>(i) * step);
    return grid;
}

/// Pooled objective of the shared-parameter calibration at one lambda, with
/// the closed-form beta refit.
double global_objective(std::span<const FittedTree> forest, const Dataset& data, double lambda) {
    std::vector<double> preds, targets;
    for (const FittedTree& tree : forest) {
        const TreeSmoother s{&tree, {KernelFamily::gaussian, lambda}, 0.0, 1.0};
        for (std::size_t i : tree.oob) {
            preds.push_back(smoothed_predict(s, data.row(i)));
            targets.push_back(data.y[i]);
        }
    }
    const OlsCoefficients beta = fit_beta_ols(preds, targets);
    double rss = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double r = beta.beta1 * preds[i] + beta.beta0 - targets[i];
        rss += r * r;
    }
    return rss;
}

double tree_objective(const FittedTree& tree, const Dataset& data, double lambda) {
    return global_objective(std::span<const FittedTree>(&tree, 1), data, lambda);
}

}  // namespace

TEST_CASE("fit_beta_ols closed-form cases") {
    const std::vector<double> p{1.0, 2.0, 3.0, 4.0};

    const OlsCoefficients identity = fit_beta_ols(p, p);
    CHECK(identity.beta1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(identity.beta0 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    std::vector<double> affine(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) affine[i] = 2.0 * p[i] + 3.0;
    const OlsCoefficients exact = fit_beta_ols(p, affine);
    CHECK(exact.beta1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(exact.beta0 == doctest::Approx(3.0).epsilon(1e-12));

    const std::vector<double> constant{5.0, 5.0, 5.0};
    const std::vector<double> targets{1.0, 2.0, 6.0};
    const OlsCoefficients degenerate = fit_beta_ols(constant, targets);
    CHECK(degenerate.beta1 == 0.0);
    CHECK(degenerate.beta0 == doctest::Approx(3.0));

    CHECK_THROWS_AS(fit_beta_ols(p, constant), std::invalid_argument);
    CHECK_THROWS_AS(fit_beta_ols(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("OLS residuals are orthogonal to predictions and to the constant") {
    Rng rng(5);
    std::vector<double> preds(60), targets(60);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        preds[i] = rng.uniform(-2.0, 2.0);
        targets[i] = 1.3 * preds[i] - 0.4 + rng.gaussian();
    }
    const OlsCoefficients beta = fit_beta_ols(preds, targets);
    double dot = 0.0, sum = 0.0, rss_ols = 0.0, rss_raw = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double r = targets[i] - (beta.beta1 * preds[i] + beta.beta0);
        dot += r * preds[i];
        sum += r;
        rss_ols += r * r;
        rss_raw += (targets[i] - preds[i]) * (targets[i] - preds[i]);
    }
    CHECK(std::abs(dot) < 1e-8);
    CHECK(std::abs(sum) < 1e-8);
    CHECK(rss_ols <= rss_raw);  // OLS dominates the uncalibrated fit
}

TEST_CASE("lambda line search recovers a quadratic minimum in log space") {
    const double u_star = std::log(0.37);
    const auto objective = [&](double lambda) {
        const double u = std::log(lambda);
        return 4.0 + 2.5 * (u - u_star) * (u - u_star);
    };
    const LambdaSearchSpec spec{1e-3, 10.0, 25, 1e-3};
    const LineSearchResult result = lambda_line_search(objective, spec);
    CHECK(std::abs(result.lambda - 0.37) / 0.37 < 0.01);
    CHECK(result.value == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("lambda line search honours the boundaries on monotone objectives") {
    const LambdaSearchSpec spec{0.01, 5.0, 12, 1e-3};
    const LineSearchResult down = lambda_line_search([](double l) { return -l; }, spec);
    CHECK(down.lambda == doctest::Approx(5.0).epsilon(1e-3));
    const LineSearchResult up = lambda_line_search([](double l) { return l; }, spec);
    CHECK(up.lambda == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("lambda line search rejects bad specs and hopeless objectives") {
    CHECK_THROWS_AS(lambda_line_search([](double) { return 0.0; }, LambdaSearchSpec{0.0, 1.0, 10, 1e-3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(lambda_line_search([](double) { return 0.0; }, LambdaSearchSpec{1.0, 0.5, 10, 1e-3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(lambda_line_search([](double) { return 0.0; }, LambdaSearchSpec{0.1, 1.0, 2, 1e-3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        lambda_line_search([](double) { return std::numeric_limits<double>::quiet_NaN(); },
                           LambdaSearchSpec{0.1, 1.0, 5, 1e-3}),
        std::runtime_error);
}

TEST_CASE("global calibration beats every grid candidate and small bandwidths win on steps") {
    const Dataset data = make_step_data(500, 0.0, 1.0, 0.0, 97);
    TreeParams params;
    params.min_samples_leaf = 5;
    params.mtry = 1;
    const std::vector<FittedTree> forest = fit_forest(data, 10, params, 13);

    const LambdaSearchSpec spec{1e-3, 10.0, 25, 1e-3};
    const CalibrationResult result = calibrate_global(forest, data, spec);
    REQUIRE(result.per_tree.size() == forest.size());
    for (const TreeCalibration& c : result.per_tree) {
        CHECK(c.lambda == result.per_tree[0].lambda);
        CHECK(c.beta0 == result.per_tree[0].beta0);
        CHECK(c.beta1 == result.per_tree[0].beta1);
    }

    const std::vector<double> grid = log_grid(spec);
    for (double lambda : grid) CHECK(result.oob_rss <= global_objective(forest, data, lambda) + 1e-9);

    // Sharp steps favour small bandwidths: at or below the 10th percentile.
    const std::size_t below =
        static_cast<std::size_t>(std::count_if(grid.begin(), grid.end(), [&](double g) {
            return g < result.per_tree[0].lambda;
        }));
    CHECK(below <= grid.size() / 10);

    // Exhaustive fine-grid oracle: the returned objective is near-optimal.
    double fine_min = kInf;
    for (int i = 0; i < 200; ++i) {
        const double lambda = std::exp(std::log(1e-3) + (std::log(10.0) - std::log(1e-3)) * i / 199.0);
        fine_min = std::min(fine_min, global_objective(forest, data, lambda));
    }
    CHECK(result.oob_rss <= fine_min * 1.01 + 1e-9);
}

TEST_CASE("a forest of identical single-leaf trees degenerates to the target mean") {
    const Dataset data = testing::random_dataset(7, 80, 1);
    TreeParams params;
    params.max_depth = 0;  // every tree is a single leaf
    params.min_samples_leaf = 1;
    params.mtry = 1;
    const BootstrapSplit split = bootstrap(data, 3);
    const std::vector<FittedTree> forest(4, fit_tree(data, split.in_bag, params));
    const CalibrationResult result = calibrate_global(forest, data, LambdaSearchSpec{0.01, 1.0, 5, 1e-3});
    CHECK(result.per_tree[0].beta1 == 0.0);

    double mean = 0.0, count = 0.0;
    for (const FittedTree& tree : forest)
        for (std::size_t i : tree.oob) {
            mean += data.y[i];
            count += 1.0;
        }
    mean /= count;
    CHECK(result.per_tree[0].beta0 == doctest::Approx(mean).epsilon(1e-9));

    double variance = 0.0;
    for (const FittedTree& tree : forest)
        for (std::size_t i : tree.oob) variance += (data.y[i] - mean) * (data.y[i] - mean);
    CHECK(result.oob_rss == doctest::Approx(variance).epsilon(1e-9));
}

TEST_CASE("local calibration: single tree equals global, many trees dominate global") {
    const Dataset data = make_hetero_data(300, 11, 0.2);
    TreeParams params;
    params.min_samples_leaf = 5;
    params.mtry = 1;
    const LambdaSearchSpec spec{1e-3, 5.0, 20, 1e-3};

    const std::vector<FittedTree> one = fit_forest(data, 1, params, 5);
    const CalibrationResult local_one = calibrate_local(one, data, spec);
    const CalibrationResult global_one = calibrate_global(one, data, spec);
    CHECK(local_one.oob_rss == doctest::Approx(global_one.oob_rss).epsilon(1e-12));
    CHECK(local_one.per_tree[0].lambda == doctest::Approx(global_one.per_tree[0].lambda).epsilon(1e-12));

    const std::vector<FittedTree> forest = fit_forest(data, 12, params, 6);
    const CalibrationResult local = calibrate_local(forest, data, spec);
    const CalibrationResult global = calibrate_global(forest, data, spec);
    CHECK(local.oob_rss <= global.oob_rss);

    // Per-tree optima agree with an exhaustive fine-grid oracle.
    for (std::size_t t = 0; t < 3; ++t) {
        double fine_min = kInf;
        for (int i = 0; i < 200; ++i) {
            const double lambda =
                std::exp(std::log(spec.lambda_min) +
                         (std::log(spec.lambda_max) - std::log(spec.lambda_min)) * i / 199.0);
            fine_min = std::min(fine_min, tree_objective(forest[t], data, lambda));
        }
        CHECK(tree_objective(forest[t], data, local.per_tree[t].lambda) <= fine_min * 1.01 + 1e-9);
    }
}

TEST_CASE("calibration is invariant to tree order") {
    const Dataset data = make_hetero_data(200, 21, 0.2);
    TreeParams params;
    params.min_samples_leaf = 5;
    params.mtry = 1;
    const LambdaSearchSpec spec{0.01, 2.0, 10, 1e-3};
    std::vector<FittedTree> forest = fit_forest(data, 6, params, 9);
    const CalibrationResult local = calibrate_local(forest, data, spec);

    std::vector<FittedTree> reversed(forest.rbegin(), forest.rend());
    const CalibrationResult local_rev = calibrate_local(reversed, data, spec);
    for (std::size_t t = 0; t < forest.size(); ++t) {
        const TreeCalibration& a = local.per_tree[t];
        const TreeCalibration& b = local_rev.per_tree[forest.size() - 1 - t];
        CHECK(a.lambda == b.lambda);
        CHECK(a.beta0 == b.beta0);
        CHECK(a.beta1 == b.beta1);
    }
    CHECK(local.oob_rss == doctest::Approx(local_rev.oob_rss).epsilon(1e-12));

    const CalibrationResult global = calibrate_global(forest, data, spec);
    const CalibrationResult global_rev = calibrate_global(reversed, data, spec);
    CHECK(global.oob_rss == doctest::Approx(global_rev.oob_rss).epsilon(1e-9));
    CHECK(global.per_tree[0].lambda == doctest::Approx(global_rev.per_tree[0].lambda).epsilon(1e-9));
}

TEST_CASE("a tree with no out-of-bag rows is a configuration error") {
    const Dataset data = testing::random_dataset(31, 40, 1);
    std::vector<std::size_t> rows(data.n);
    for (std::size_t i = 0; i < data.n; ++i) rows[i] = i;
    TreeParams params;
    params.min_samples_leaf = 2;
    params.mtry = 1;
    std::vector<FittedTree> forest;
    forest.push_back(fit_tree(data, rows, params));  // in-bag covers every row
    CHECK(forest[0].oob.empty());
    CHECK_THROWS_WITH_AS(calibrate_global(forest, data, LambdaSearchSpec{0.01, 1.0, 5, 1e-3}),
                         doctest::Contains("out-of-bag"), std::runtime_error);
    CHECK_THROWS_AS(calibrate_local(forest, data, LambdaSearchSpec{0.01, 1.0, 5, 1e-3}),
                    std::runtime_error);
}

TEST_CASE("default lambda search range follows the feature scale") {
    Dataset d = testing::random_dataset(41, 200, 3);
    const LambdaSearchSpec spec = default_lambda_search(d);
    CHECK(spec.lambda_min > 0.0);
    CHECK(spec.lambda_max == doctest::Approx(1e4 * spec.lambda_min).epsilon(1e-9));
    // Uniform(-2, 2) features: sd ~ 1.155, so the range brackets it broadly.
    CHECK(spec.lambda_min < 0.01);
    CHECK(spec.lambda_max > 10.0);

    // Scaling the features scales the range.
    for (double& v : d.x) v *= 10.0;
    const LambdaSearchSpec scaled = default_lambda_search(d);
    CHECK(scaled.lambda_min == doctest::Approx(10.0 * spec.lambda_min).epsilon(1e-9));
}
