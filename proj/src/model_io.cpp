#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "srf/ensemble.hpp"

namespace srf {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kFormatTag = "srf-model";

// JSON has no literal for infinities; box bounds encode them as strings.
json encode_bound(double v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    return v;
}

double decode_bound(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::runtime_error("model file: bad bound value '" + s + "'");
    }
    return j.get<double>();
}

json tree_to_json(const FittedTree& tree, const TreeCalibration& cal) {
    json nodes = json::array();
    for (const TreeNode& n : tree.nodes) {
        if (n.is_leaf())
            nodes.push_back(json{{"leaf", n.leaf}});
        else
            nodes.push_back(json{{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                                 {"right", n.right}});
    }
    json leaves = json::array();
    for (const LeafRegion& leaf : tree.leaves) {
        json lower = json::array(), upper = json::array();
        for (double v : leaf.lower) lower.push_back(encode_bound(v));
        for (double v : leaf.upper) upper.push_back(encode_bound(v));
        leaves.push_back(json{{"lower", lower}, {"upper", upper}, {"constant", leaf.constant}});
    }
    return json{{"nodes", nodes},
                {"leaves", leaves},
                {"in_bag", tree.in_bag},
                {"oob", tree.oob},
                {"lambda", cal.lambda},
                {"beta0", cal.beta0},
                {"beta1", cal.beta1}};
}

void tree_from_json(const json& j, std::size_t dim, FittedTree& tree, TreeCalibration& cal) {
    tree.dim = dim;
    for (const json& n : j.at("nodes")) {
        TreeNode node;
        if (n.contains("leaf")) {
            node.leaf = n.at("leaf").get<int>();
        } else {
            node.feature = n.at("feature").get<int>();
            node.threshold = n.at("threshold").get<double>();
            node.left = n.at("left").get<int>();
            node.right = n.at("right").get<int>();
        }
        tree.nodes.push_back(node);
    }
    for (const json& l : j.at("leaves")) {
        LeafRegion leaf;
        for (const json& v : l.at("lower")) leaf.lower.push_back(decode_bound(v));
        for (const json& v : l.at("upper")) leaf.upper.push_back(decode_bound(v));
        leaf.constant = l.at("constant").get<double>();
        if (leaf.lower.size() != dim || leaf.upper.size() != dim)
            throw std::runtime_error("model file: leaf bound length does not match feature count");
        tree.leaves.push_back(std::move(leaf));
    }
    tree.in_bag = j.at("in_bag").get<std::vector<std::size_t>>();
    tree.oob = j.at("oob").get<std::vector<std::size_t>>();
    cal.lambda = j.at("lambda").get<double>();
    cal.beta0 = j.at("beta0").get<double>();
    cal.beta1 = j.at("beta1").get<double>();
    if (tree.nodes.empty() || tree.leaves.empty())
        throw std::runtime_error("model file: tree with no nodes or no leaves");
}

}  // namespace

void save_model(const SmoothedForestModel& model, const std::string& path) {
    json j;
    j["format"] = kFormatTag;
    j["version"] = kFormatVersion;
    j["kernel"] = to_string(model.kernel_family);
    j["calibration"] = to_string(model.meta.calibration);
    j["noise_mode"] = to_string(model.meta.noise);
    j["noise_variance"] = model.noise_variance;
    j["feature_names"] = model.meta.feature_names;
    j["target_name"] = model.meta.target_name;
    j["n_features"] = model.meta.feature_names.size();
    j["n_trees"] = model.trees.size();
    j["seed"] = model.meta.seed;
    j["tree_params"] = json{{"max_depth", model.meta.tree_params.max_depth},
                            {"min_samples_leaf", model.meta.tree_params.min_samples_leaf},
                            {"mtry", model.meta.tree_params.mtry}};
    json trees = json::array();
    for (std::size_t t = 0; t < model.trees.size(); ++t)
        trees.push_back(tree_to_json(model.trees[t], model.smoothers[t]));
    j["trees"] = std::move(trees);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << j.dump(1) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

SmoothedForestModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed model file " + path + ": " + e.what());
    }
    try {
        if (!j.contains("format") || j.at("format").get<std::string>() != kFormatTag)
            throw std::runtime_error("malformed model file " + path + ": missing format tag");
        const int version = j.at("version").get<int>();
        if (version > kFormatVersion)
            throw std::runtime_error("model file " + path + " has format version " +
                                     std::to_string(version) + "; this build reads up to version " +
                                     std::to_string(kFormatVersion));

        SmoothedForestModel model;
        model.kernel_family = kernel_family_from_string(j.at("kernel").get<std::string>());
        model.meta.calibration = calibration_mode_from_string(j.at("calibration").get<std::string>());
        model.meta.noise = noise_mode_from_string(j.at("noise_mode").get<std::string>());
        model.noise_variance = j.at("noise_variance").get<double>();
        model.meta.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        model.meta.target_name = j.at("target_name").get<std::string>();
        model.meta.seed = j.at("seed").get<std::uint64_t>();
        const json& tp = j.at("tree_params");
        model.meta.tree_params.max_depth = tp.at("max_depth").get<int>();
        model.meta.tree_params.min_samples_leaf = tp.at("min_samples_leaf").get<std::size_t>();
        model.meta.tree_params.mtry = tp.at("mtry").get<std::size_t>();

        const std::size_t dim = j.at("n_features").get<std::size_t>();
        if (dim != model.meta.feature_names.size())
            throw std::runtime_error("model file: n_features disagrees with feature_names");
        const std::size_t n_trees = j.at("n_trees").get<std::size_t>();
        const json& trees = j.at("trees");
        if (trees.size() != n_trees || n_trees == 0)
            throw std::runtime_error("model file: tree count mismatch");
        for (const json& t : trees) {
            FittedTree tree;
            TreeCalibration cal;
            tree_from_json(t, dim, tree, cal);
            model.trees.push_back(std::move(tree));
            model.smoothers.push_back(cal);
        }
        model.meta.n_trees = n_trees;
        return model;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed model file " + path + ": " + e.what());
    }
}

}  // namespace srf
