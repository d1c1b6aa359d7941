#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srf/dataset.hpp"

namespace srf {

/// One axis-parallel cell of a tree's partition of R^p. Intervals are
/// half-open [lower, upper) per dimension, so the cells of a fitted tree
/// tile the whole space with no overlap; infinite bounds are allowed.
struct LeafRegion {
    std::vector<double> lower;  // length p, -inf allowed
    std::vector<double> upper;  // length p, +inf allowed
    double constant = 0.0;      // in-bag target mean of the leaf

    bool contains(std::span<const double> x) const {
        for (std::size_t j = 0; j < lower.size(); ++j)
            if (!(lower[j] <= x[j] && x[j] < upper[j])) return false;
        return true;
    }
};

/// Internal split or terminal node. A point goes left iff x[feature] < threshold.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf = -1;  // index into FittedTree::leaves when terminal

    bool is_leaf() const { return feature < 0; }
};

struct TreeParams {
    int max_depth = -1;  // -1: unlimited
    std::size_t min_samples_leaf = 5;
    std::size_t mtry = 0;  // features tried per split; 0: max(1, p/3)
    std::uint64_t seed = 0;
};

/// A trained regression tree: split nodes for O(depth) lookup plus the
/// flattened leaf-cell list used by the smoothing machinery. Immutable after
/// fitting; shareable across threads.
struct FittedTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<LeafRegion> leaves;
    std::vector<std::size_t> in_bag;  // training rows, with multiplicity
    std::vector<std::size_t> oob;     // ascending; dataset rows absent from in_bag
    std::size_t dim = 0;              // p

    std::size_t leaf_index_of(std::span<const double> x) const {
        const TreeNode* node = &nodes[0];
        while (!node->is_leaf())
            node = &nodes[x[static_cast<std::size_t>(node->feature)] < node->threshold ? node->left
                                                                                       : node->right];
        return static_cast<std::size_t>(node->leaf);
    }
};

/// Greedy CART regression fit on the given rows (repeats allowed): splits
/// minimize within-node squared error, thresholds sit at the midpoint of the
/// two straddling sorted values, ties go to the lowest feature index and then
/// the lowest threshold. Leaf boxes are built by intersecting ancestor
/// half-spaces starting from (-inf, +inf)^p.
FittedTree fit_tree(const Dataset& data, std::span<const std::size_t> rows, const TreeParams& params);

/// Constant of the unique leaf cell containing x.
double tree_predict_raw(const FittedTree& tree, std::span<const double> x);

/// The tree's partition of R^p: pairwise disjoint, union the whole space.
const std::vector<LeafRegion>& extract_leaf_regions(const FittedTree& tree);

}  // namespace srf
