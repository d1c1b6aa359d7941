#include "srf/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "srf/smooth.hpp"

namespace srf {

namespace {

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

double sample_sd(const Dataset& d, std::size_t j) {
    if (d.n < 2) return 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) mean += d.at(i, j);
    mean /= static_cast<double>(d.n);
    double ss = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        const double c = d.at(i, j) - mean;
        ss += c * c;
    }
    return std::sqrt(ss / static_cast<double>(d.n - 1));
}

}  // namespace

LambdaSearchSpec default_lambda_search(const Dataset& d) {
    std::vector<double> sds(d.p);
    for (std::size_t j = 0; j < d.p; ++j) sds[j] = sample_sd(d, j);
    double s = median_of(sds);
    if (!(s > 0.0)) s = *std::max_element(sds.begin(), sds.end());
    if (!(s > 0.0)) s = 1.0;
    return LambdaSearchSpec{1e-3 * s, 10.0 * s, 25, 1e-3};
}

OlsCoefficients fit_beta_ols(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size())
        throw std::invalid_argument("fit_beta_ols: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("fit_beta_ols: empty input");
    const double n = static_cast<double>(predictions.size());
    double mean_p = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        mean_p += predictions[i];
        mean_y += targets[i];
    }
    mean_p /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double dp = predictions[i] - mean_p;
        sxx += dp * dp;
        sxy += dp * (targets[i] - mean_y);
    }
    // Constant predictions (variance at rounding-noise level): minimum-norm limit.
    if (sxx <= n * 1e-24 * (1.0 + mean_p * mean_p)) return {0.0, mean_y};
    const double beta1 = sxy / sxx;
    return {beta1, mean_y - beta1 * mean_p};
}

LineSearchResult lambda_line_search(const std::function<double(double)>& objective,
                                    const LambdaSearchSpec& spec) {
    if (!(spec.lambda_min > 0.0) || !(spec.lambda_max > spec.lambda_min) ||
        !std::isfinite(spec.lambda_max))
        throw std::invalid_argument("lambda search: need 0 < lambda_min < lambda_max < inf");
    if (spec.grid_size < 3) throw std::invalid_argument("lambda search: grid size must be >= 3");

    const double u_lo = std::log(spec.lambda_min);
    const double u_hi = std::log(spec.lambda_max);
    const double step = (u_hi - u_lo) / static_cast<double>(spec.grid_size - 1);

    LineSearchResult best{0.0, std::numeric_limits<double>::infinity()};
    const auto eval = [&](double u) {
        const double lambda = std::exp(u);
        double v = objective(lambda);
        if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
        if (v < best.value) best = {lambda, v};
        return v;
    };

    std::size_t best_index = 0;
    double best_grid_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.grid_size; ++i) {
        const double v = eval(u_lo + static_cast<double>(i) * step);
        if (v < best_grid_value) {
            best_grid_value = v;
            best_index = i;
        }
    }
    if (!std::isfinite(best.value))
        throw std::runtime_error("lambda search: objective is non-finite at every grid point");

    // Golden-section refinement between the neighbours of the best grid point.
    double a = u_lo + static_cast<double>(best_index == 0 ? 0 : best_index - 1) * step;
    double b = u_lo + static_cast<double>(std::min(best_index + 1, spec.grid_size - 1)) * step;
    const double tol = std::log1p(spec.refine_rel_tol);
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    for (int iter = 0; iter < 200 && (b - a) > tol; ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    return best;
}

std::string to_string(CalibrationMode mode) {
    return mode == CalibrationMode::global ? "global" : "local";
}

CalibrationMode calibration_mode_from_string(const std::string& name) {
    if (name == "global") return CalibrationMode::global;
    if (name == "local") return CalibrationMode::local;
    throw std::invalid_argument("unknown calibration mode: '" + name + "'");
}

namespace {

void require_oob(std::span<const FittedTree> forest) {
    if (forest.empty()) throw std::invalid_argument("calibrate: empty forest");
    for (std::size_t t = 0; t < forest.size(); ++t)
        if (forest[t].oob.empty())
            throw std::runtime_error("calibrate: tree " + std::to_string(t) +
                                     " has no out-of-bag rows; train on more rows or draw a smaller "
                                     "in-bag sample");
}

/// Uncalibrated smoothed predictions at a tree's OOB rows for one lambda;
/// computed once per (tree, lambda) and reused by the beta refit and the
/// residual evaluation.
void oob_predictions(const FittedTree& tree, const Dataset& data, KernelFamily family, double lambda,
                     std::vector<double>& out) {
    const TreeSmoother s{&tree, {family, lambda}, 0.0, 1.0};
    out.resize(tree.oob.size());
    for (std::size_t i = 0; i < tree.oob.size(); ++i) out[i] = smoothed_predict(s, data.row(tree.oob[i]));
}

double rss_with(const OlsCoefficients& beta, std::span<const double> preds,
                std::span<const double> targets) {
    double rss = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double r = beta.beta1 * preds[i] + beta.beta0 - targets[i];
        rss += r * r;
    }
    return rss;
}

}  // namespace

CalibrationResult calibrate_global(std::span<const FittedTree> forest, const Dataset& data,
                                   const LambdaSearchSpec& search) {
    require_oob(forest);

    std::vector<double> targets;
    for (const FittedTree& tree : forest)
        for (std::size_t i : tree.oob) targets.push_back(data.y[i]);

    std::vector<double> preds(targets.size());
    std::vector<double> tree_preds;
    const auto pooled_predictions = [&](double lambda) {
        std::size_t at = 0;
        for (const FittedTree& tree : forest) {
            oob_predictions(tree, data, KernelFamily::gaussian, lambda, tree_preds);
            std::copy(tree_preds.begin(), tree_preds.end(), preds.begin() + static_cast<std::ptrdiff_t>(at));
            at += tree_preds.size();
        }
    };
    const auto objective = [&](double lambda) {
        pooled_predictions(lambda);
        return rss_with(fit_beta_ols(preds, targets), preds, targets);
    };

    const LineSearchResult found = lambda_line_search(objective, search);
    pooled_predictions(found.lambda);
    const OlsCoefficients beta = fit_beta_ols(preds, targets);

    CalibrationResult result;
    result.mode = CalibrationMode::global;
    result.per_tree.assign(forest.size(), TreeCalibration{found.lambda, beta.beta0, beta.beta1});
    result.oob_rss = found.value;
    return result;
}

CalibrationResult calibrate_local(std::span<const FittedTree> forest, const Dataset& data,
                                  const LambdaSearchSpec& search) {
    require_oob(forest);

    CalibrationResult result;
    result.mode = CalibrationMode::local;
    result.per_tree.resize(forest.size());
    result.oob_rss = 0.0;

    std::vector<double> preds;
    for (std::size_t t = 0; t < forest.size(); ++t) {
        const FittedTree& tree = forest[t];
        std::vector<double> targets(tree.oob.size());
        for (std::size_t i = 0; i < tree.oob.size(); ++i) targets[i] = data.y[tree.oob[i]];

        const auto objective = [&](double lambda) {
            oob_predictions(tree, data, KernelFamily::gaussian, lambda, preds);
            return rss_with(fit_beta_ols(preds, targets), preds, targets);
        };
        const LineSearchResult found = lambda_line_search(objective, search);
        oob_predictions(tree, data, KernelFamily::gaussian, found.lambda, preds);
        const OlsCoefficients beta = fit_beta_ols(preds, targets);

        result.per_tree[t] = TreeCalibration{found.lambda, beta.beta0, beta.beta1};
        result.oob_rss += found.value;
    }
    return result;
}

}  // namespace srf
