#include "srf/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "srf/rng.hpp"

namespace srf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BestSplit {
    double reduction = 0.0;
    int feature = -1;
    double threshold = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, const TreeParams& params, std::size_t mtry, FittedTree& out)
        : data_(data), params_(params), mtry_(mtry), out_(out), rng_(params.seed),
          lower_(data.p, -kInf), upper_(data.p, kInf), feature_pool_(data.p) {
        std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
    }

    int build(std::vector<std::size_t>& rows, int depth) {
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t r : rows) {
            sum += data_.y[r];
            sumsq += data_.y[r] * data_.y[r];
        }
        const double mean = sum / static_cast<double>(rows.size());

        BestSplit best;
        const bool depth_ok = params_.max_depth < 0 || depth < params_.max_depth;
        if (depth_ok && rows.size() >= 2 * params_.min_samples_leaf)
            best = find_best_split(rows, sum, sumsq);

        if (best.feature < 0) return make_leaf(mean);

        const std::size_t j = static_cast<std::size_t>(best.feature);
        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows)
            (data_.at(r, j) < best.threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int node_index = static_cast<int>(out_.nodes.size());
        out_.nodes.emplace_back();

        const double saved_upper = upper_[j];
        upper_[j] = best.threshold;
        const int left = build(left_rows, depth + 1);
        upper_[j] = saved_upper;

        const double saved_lower = lower_[j];
        lower_[j] = best.threshold;
        const int right = build(right_rows, depth + 1);
        lower_[j] = saved_lower;

        TreeNode& node = out_.nodes[static_cast<std::size_t>(node_index)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }

private:
    int make_leaf(double mean) {
        const int node_index = static_cast<int>(out_.nodes.size());
        TreeNode node;
        node.leaf = static_cast<int>(out_.leaves.size());
        out_.nodes.push_back(node);
        out_.leaves.push_back(LeafRegion{lower_, upper_, mean});
        return node_index;
    }

    BestSplit find_best_split(const std::vector<std::size_t>& rows, double sum, double sumsq) {
        BestSplit best;
        // Floating-point noise floor: exactly-constant targets must not split.
        const double tol = 1e-12 * std::max(1.0, sumsq);
        const double parent_score = sum * sum / static_cast<double>(rows.size());

        sample_features();
        sorted_.assign(rows.begin(), rows.end());
        for (std::size_t fi = 0; fi < mtry_; ++fi) {
            const std::size_t j = feature_pool_[fi];
            std::sort(sorted_.begin(), sorted_.end(), [&](std::size_t a, std::size_t b) {
                return data_.at(a, j) < data_.at(b, j);
            });
            const std::size_t m = sorted_.size();
            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < m; ++i) {
                left_sum += data_.y[sorted_[i]];
                const std::size_t n_left = i + 1;
                const std::size_t n_right = m - n_left;
                if (n_left < params_.min_samples_leaf || n_right < params_.min_samples_leaf) continue;
                const double lo = data_.at(sorted_[i], j);
                const double hi = data_.at(sorted_[i + 1], j);
                if (!(lo < hi)) continue;
                const double right_sum = sum - left_sum;
                const double reduction = left_sum * left_sum / static_cast<double>(n_left) +
                                         right_sum * right_sum / static_cast<double>(n_right) - parent_score;
                if (reduction > tol && reduction > best.reduction) {
                    best.reduction = reduction;
                    best.feature = static_cast<int>(j);
                    double t = lo + (hi - lo) / 2.0;
                    if (!(t > lo)) t = hi;  // midpoint rounded down to lo: step up
                    best.threshold = t;
                }
            }
        }
        return best;
    }

    void sample_features() {
        const std::size_t p = data_.p;
        if (mtry_ == p) return;  // all features, fixed ascending order
        for (std::size_t i = 0; i < mtry_; ++i) {
            const std::size_t k = i + rng_.uniform_index(p - i);
            std::swap(feature_pool_[i], feature_pool_[k]);
        }
        std::sort(feature_pool_.begin(), feature_pool_.begin() + static_cast<std::ptrdiff_t>(mtry_));
    }

    const Dataset& data_;
    const TreeParams& params_;
    std::size_t mtry_;
    FittedTree& out_;
    Rng rng_;
    std::vector<double> lower_, upper_;
    std::vector<std::size_t> feature_pool_;
    std::vector<std::size_t> sorted_;
};

}  // namespace

FittedTree fit_tree(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params) {
    if (rows.empty()) throw std::invalid_argument("fit_tree: empty row set");
    if (params.min_samples_leaf < 1) throw std::invalid_argument("fit_tree: min_samples_leaf must be >= 1");
    const std::size_t mtry = params.mtry == 0 ? std::max<std::size_t>(1, data.p / 3) : params.mtry;
    if (mtry > data.p) throw std::invalid_argument("fit_tree: mtry exceeds feature count");
    for (std::size_t r : rows)
        if (r >= data.n) throw std::invalid_argument("fit_tree: row index out of range");

    FittedTree tree;
    tree.dim = data.p;
    tree.in_bag.assign(rows.begin(), rows.end());
    std::vector<bool> seen(data.n, false);
    for (std::size_t r : rows) seen[r] = true;
    for (std::size_t i = 0; i < data.n; ++i)
        if (!seen[i]) tree.oob.push_back(i);

    TreeBuilder builder(data, params, mtry, tree);
    std::vector<std::size_t> root_rows(rows.begin(), rows.end());
    builder.build(root_rows, 0);
    return tree;
}

double tree_predict_raw(const FittedTree& tree, std::span<const double> x) {
    return tree.leaves[tree.leaf_index_of(x)].constant;
}

const std::vector<LeafRegion>& extract_leaf_regions(const FittedTree& tree) { return tree.leaves; }

}  // namespace srf
