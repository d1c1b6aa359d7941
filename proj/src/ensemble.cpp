#include "srf/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srf/rng.hpp"

namespace srf {

std::string to_string(NoiseMode mode) { return mode == NoiseMode::in_sample ? "in_sample" : "out_of_bag"; }

NoiseMode noise_mode_from_string(const std::string& name) {
    if (name == "in_sample") return NoiseMode::in_sample;
    if (name == "out_of_bag") return NoiseMode::out_of_bag;
    throw std::invalid_argument("unknown noise mode: '" + name + "'");
}

std::vector<FittedTree> fit_forest(const Dataset& data, std::size_t n_trees, const TreeParams& params,
                                   std::uint64_t seed) {
    if (n_trees == 0) throw std::invalid_argument("fit_forest: need at least one tree");
    validate(data);
    std::vector<FittedTree> forest;
    forest.reserve(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) {
        const BootstrapSplit split = bootstrap(data, derive_seed(seed, t, 0));
        TreeParams tree_params = params;
        tree_params.seed = derive_seed(seed, t, 1);
        FittedTree tree = fit_tree(data, split.in_bag, tree_params);
        tree.oob = split.oob;
        forest.push_back(std::move(tree));
    }
    return forest;
}

namespace {

double smoothed_noise_variance(const SmoothedForestModel& model, const Dataset& train, NoiseMode mode) {
    if (mode == NoiseMode::in_sample) {
        double acc = 0.0;
        for (std::size_t i = 0; i < train.n; ++i) {
            const double r = forest_predict_smoothed(model, train.row(i)) - train.y[i];
            acc += r * r;
        }
        return acc / static_cast<double>(train.n);
    }
    // Out-of-bag: per row, average the smoothed predictions of the trees
    // that held the row out; rows in every bag are skipped.
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < train.n; ++i) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            const auto& oob = model.trees[t].oob;
            if (std::binary_search(oob.begin(), oob.end(), i)) {
                sum += smoothed_predict(model.smoother(t), train.row(i));
                ++count;
            }
        }
        if (count == 0) continue;
        const double r = sum / static_cast<double>(count) - train.y[i];
        acc += r * r;
        ++used;
    }
    if (used == 0)
        throw std::runtime_error("noise estimate: no training row is out-of-bag for any tree");
    return acc / static_cast<double>(used);
}

}  // namespace

SmoothedForestModel build_smoothed_model(std::vector<FittedTree> trees, const CalibrationResult& calibration,
                                         const Dataset& train, NoiseMode noise_mode, ModelMetadata meta) {
    if (trees.empty()) throw std::invalid_argument("build_smoothed_model: empty forest");
    if (calibration.per_tree.size() != trees.size())
        throw std::invalid_argument("build_smoothed_model: calibration entries do not match tree count");
    SmoothedForestModel model;
    model.trees = std::move(trees);
    model.smoothers = calibration.per_tree;
    model.kernel_family = KernelFamily::gaussian;
    model.meta = std::move(meta);
    model.meta.n_trees = model.trees.size();
    model.meta.calibration = calibration.mode;
    model.meta.noise = noise_mode;
    model.noise_variance = smoothed_noise_variance(model, train, noise_mode);
    return model;
}

double forest_predict_smoothed(const SmoothedForestModel& model, std::span<const double> x0) {
    double acc = 0.0;
    for (std::size_t t = 0; t < model.trees.size(); ++t) acc += smoothed_predict(model.smoother(t), x0);
    return acc / static_cast<double>(model.trees.size());
}

PredictiveDistribution forest_uncertainty(const SmoothedForestModel& model, std::span<const double> x0) {
    const std::size_t T = model.trees.size();
    std::vector<double> means(T);
    double intra = 0.0, mean = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const TreeSmoother s = model.smoother(t);
        means[t] = smoothed_predict(s, x0);
        intra += smoothed_variance(s, x0);
        mean += means[t];
    }
    intra /= static_cast<double>(T);
    mean /= static_cast<double>(T);
    double inter = 0.0;
    for (double m : means) inter += (m - mean) * (m - mean);
    inter /= static_cast<double>(T);

    PredictiveDistribution out;
    out.mean = mean;
    out.intra = intra;
    out.inter = inter;
    out.noise = model.noise_variance;
    out.variance = intra + inter + out.noise;
    return out;
}

MeanVariance rf_baseline_predict(std::span<const FittedTree> trees, std::span<const double> x0) {
    if (trees.empty()) throw std::invalid_argument("rf_baseline_predict: empty forest");
    const std::size_t T = trees.size();
    std::vector<double> preds(T);
    double mean = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        preds[t] = tree_predict_raw(trees[t], x0);
        mean += preds[t];
    }
    mean /= static_cast<double>(T);
    double var = 0.0;
    for (double v : preds) var += (v - mean) * (v - mean);
    var /= static_cast<double>(T);
    return {mean, var};
}

double rf_baseline_noise_variance(std::span<const FittedTree> trees, const Dataset& train, NoiseMode mode) {
    if (trees.empty()) throw std::invalid_argument("rf_baseline_noise_variance: empty forest");
    if (mode == NoiseMode::in_sample) {
        double acc = 0.0;
        for (std::size_t i = 0; i < train.n; ++i) {
            const double r = rf_baseline_predict(trees, train.row(i)).mean - train.y[i];
            acc += r * r;
        }
        return acc / static_cast<double>(train.n);
    }
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < train.n; ++i) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const FittedTree& tree : trees) {
            if (std::binary_search(tree.oob.begin(), tree.oob.end(), i)) {
                sum += tree_predict_raw(tree, train.row(i));
                ++count;
            }
        }
        if (count == 0) continue;
        const double r = sum / static_cast<double>(count) - train.y[i];
        acc += r * r;
        ++used;
    }
    if (used == 0)
        throw std::runtime_error("noise estimate: no training row is out-of-bag for any tree");
    return acc / static_cast<double>(used);
}

}  // namespace srf
