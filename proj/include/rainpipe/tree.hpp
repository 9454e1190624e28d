#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rainpipe/matrix.hpp"
#include "rainpipe/rng.hpp"

namespace rainpipe {

// Binary tree with numeric splits. Internal nodes route x[feature] < threshold
// to the left child; leaves carry a value (class-1 fraction for
// classification trees, a fitted constant for regression trees).
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;
    double value = 0.0;
    std::size_t n_samples = 0;

    bool is_leaf() const { return !left; }

    double predict_row(std::span<const double> x) const {
        const TreeNode* node = this;
        while (!node->is_leaf()) {
            node = (x[static_cast<std::size_t>(node->feature)] < node->threshold)
                       ? node->left.get()
                       : node->right.get();
        }
        return node->value;
    }

    TreeNode* leaf_for(std::span<const double> x) {
        TreeNode* node = this;
        while (!node->is_leaf()) {
            node = (x[static_cast<std::size_t>(node->feature)] < node->threshold)
                       ? node->left.get()
                       : node->right.get();
        }
        return node;
    }

    std::size_t count_leaves() const {
        if (is_leaf()) return 1;
        return left->count_leaves() + right->count_leaves();
    }
    std::size_t depth() const {
        if (is_leaf()) return 0;
        return 1 + std::max(left->depth(), right->depth());
    }
};

nlohmann::json tree_to_json(const TreeNode& node);
std::unique_ptr<TreeNode> tree_from_json(const nlohmann::json& j);

enum class SplitCriterion {
    gini, // weighted Gini impurity decrease, 0/1 targets
    sse   // squared-error reduction, real targets
};

struct TreeFitOptions {
    SplitCriterion criterion = SplitCriterion::gini;
    std::size_t max_depth = 0;         // 0 = unlimited
    std::size_t min_samples_split = 2; // counted in distinct rows
    std::size_t max_features = 0;      // 0 = all; else per-split random subset
    Rng* rng = nullptr;                // required when max_features > 0
};

// Row order per feature, sorted by (value, row id). Built once and shared
// when many trees are fit on the same matrix.
struct SortedColumns {
    std::vector<std::vector<std::uint32_t>> order;
    static SortedColumns build(const FeatureMatrix& X);
};

// CART-style exhaustive split search: candidate thresholds are midpoints
// between consecutive distinct values, gain ties break toward the lower
// feature index and then the lower threshold. Stops on depth, node size,
// purity, or when no split has positive gain. `weights` may be null for
// unit weights; `rows` are the distinct fit rows (weights carry bootstrap
// multiplicity when needed).
std::unique_ptr<TreeNode> fit_decision_tree(const FeatureMatrix& X,
                                            std::span<const double> targets,
                                            const double* weights,
                                            const std::vector<std::uint32_t>& rows,
                                            const TreeFitOptions& options,
                                            const SortedColumns* presorted = nullptr);

} // namespace rainpipe
