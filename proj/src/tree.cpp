#include "rainpipe/tree.hpp"

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "rainpipe/errors.hpp"
#include "rainpipe/parallel.hpp"

namespace rainpipe {

using nlohmann::json;

json tree_to_json(const TreeNode& node) {
    if (node.is_leaf()) {
        return json{{"value", node.value}, {"n", node.n_samples}};
    }
    return json{{"feature", node.feature},
                {"threshold", node.threshold},
                {"n", node.n_samples},
                {"left", tree_to_json(*node.left)},
                {"right", tree_to_json(*node.right)}};
}

std::unique_ptr<TreeNode> tree_from_json(const json& j) {
    auto node = std::make_unique<TreeNode>();
    node->n_samples = j.at("n").get<std::size_t>();
    if (j.contains("feature")) {
        node->feature = j.at("feature").get<int>();
        node->threshold = j.at("threshold").get<double>();
        node->left = tree_from_json(j.at("left"));
        node->right = tree_from_json(j.at("right"));
    } else {
        node->value = j.at("value").get<double>();
    }
    return node;
}

SortedColumns SortedColumns::build(const FeatureMatrix& X) {
    SortedColumns cols;
    cols.order.resize(X.n_cols());
    parallel_for(X.n_cols(), [&](std::size_t j) {
        auto& ord = cols.order[j];
        ord.resize(X.n_rows());
        std::iota(ord.begin(), ord.end(), 0u);
        std::sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) {
            const double va = X(a, j), vb = X(b, j);
            return va < vb || (va == vb && a < b);
        });
    });
    return cols;
}

namespace {

struct FitContext {
    const FeatureMatrix& X;
    std::span<const double> targets;
    const double* weights; // nullptr = unit weights
    const TreeFitOptions& options;

    double weight(std::uint32_t row) const { return weights ? weights[row] : 1.0; }
};

struct NodeStats {
    double w_total = 0.0;  // sum of weights
    double wt_sum = 0.0;   // sum of weight * target
    double wt2_sum = 0.0;  // sum of weight * target^2
    double t_min = 0.0;
    double t_max = 0.0;
};

NodeStats node_stats(const FitContext& ctx, const std::vector<std::uint32_t>& rows) {
    NodeStats s;
    s.t_min = ctx.targets[rows.front()];
    s.t_max = s.t_min;
    for (std::uint32_t r : rows) {
        const double w = ctx.weight(r);
        const double t = ctx.targets[r];
        s.w_total += w;
        s.wt_sum += w * t;
        s.wt2_sum += w * t * t;
        s.t_min = std::min(s.t_min, t);
        s.t_max = std::max(s.t_max, t);
    }
    return s;
}

// Impurity mass of a child: weighted Gini (w * 2p(1-p)) or weighted SSE.
// Split gain compares parent mass against the children's combined mass.
double impurity_mass(SplitCriterion c, double w, double s, double q) {
    if (w <= 0.0) return 0.0;
    if (c == SplitCriterion::gini) {
        const double p = s / w;
        return w * 2.0 * p * (1.0 - p);
    }
    return q - s * s / w;
}

struct BestSplit {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Scans one feature's sorted row list; boundaries between distinct values
// are the candidates. Zero-gain splits are admissible (an XOR pattern is
// only separable through them), so a feature yields no candidate only when
// it is constant within the node. Ties keep the first candidate seen, i.e.
// the lowest threshold.
BestSplit scan_feature(const FitContext& ctx, int feature,
                       const std::vector<std::uint32_t>& sorted_rows,
                       const NodeStats& parent) {
    BestSplit best;
    const std::size_t j = static_cast<std::size_t>(feature);
    const double parent_mass =
        impurity_mass(ctx.options.criterion, parent.w_total, parent.wt_sum, parent.wt2_sum);

    double wl = 0.0, sl = 0.0, ql = 0.0;
    for (std::size_t p = 1; p < sorted_rows.size(); ++p) {
        const std::uint32_t prev = sorted_rows[p - 1];
        const double w = ctx.weight(prev);
        const double t = ctx.targets[prev];
        wl += w;
        sl += w * t;
        ql += w * t * t;

        const double v_prev = ctx.X(prev, j);
        const double v_next = ctx.X(sorted_rows[p], j);
        if (v_next == v_prev) continue;
        const double wr = parent.w_total - wl;
        if (wl <= 0.0 || wr <= 0.0) continue;
        const double gain = parent_mass -
                            impurity_mass(ctx.options.criterion, wl, sl, ql) -
                            impurity_mass(ctx.options.criterion, wr, parent.wt_sum - sl,
                                          parent.wt2_sum - ql);
        const bool take = best.feature < 0 ? gain >= 0.0 : gain > best.gain;
        if (take) {
            // midpoint, nudged up to the next value if rounding collapsed it
            double mid = v_prev + (v_next - v_prev) * 0.5;
            if (!(mid > v_prev)) mid = v_next;
            best.feature = feature;
            best.threshold = mid;
            best.gain = gain;
        }
    }
    return best;
}

// `order[j]` holds this node's rows sorted by feature j; consumed (moved
// from) as the recursion partitions them into child lists.
std::unique_ptr<TreeNode> fit_node(const FitContext& ctx,
                                   std::vector<std::vector<std::uint32_t>>& order,
                                   std::size_t depth) {
    const std::vector<std::uint32_t>& rows = order.front();
    const NodeStats stats = node_stats(ctx, rows);

    auto node = std::make_unique<TreeNode>();
    node->n_samples = rows.size();
    node->value = stats.w_total > 0.0 ? stats.wt_sum / stats.w_total : 0.0;

    const bool depth_capped =
        ctx.options.max_depth > 0 && depth >= ctx.options.max_depth;
    const bool too_small = rows.size() < ctx.options.min_samples_split;
    const bool pure = stats.t_min == stats.t_max;
    if (depth_capped || too_small || pure) return node;

    const std::size_t d = ctx.X.n_cols();
    BestSplit best;
    if (ctx.options.max_features > 0 && ctx.options.max_features < d) {
        if (ctx.options.rng == nullptr) {
            throw ConfigError("per-split feature subsets need an RNG");
        }
        // sample_without_replacement returns ascending indices, so the
        // first-improvement scan still favors the lower feature index
        for (std::size_t j :
             ctx.options.rng->sample_without_replacement(d, ctx.options.max_features)) {
            BestSplit cand = scan_feature(ctx, static_cast<int>(j), order[j], stats);
            if (cand.feature >= 0 && (best.feature < 0 || cand.gain > best.gain)) best = cand;
        }
    } else {
        for (std::size_t j = 0; j < d; ++j) {
            BestSplit cand = scan_feature(ctx, static_cast<int>(j), order[j], stats);
            if (cand.feature >= 0 && (best.feature < 0 || cand.gain > best.gain)) best = cand;
        }
    }
    if (best.feature < 0) return node; // every candidate feature is constant here

    node->feature = best.feature;
    node->threshold = best.threshold;

    // stable partition of every per-feature list keeps each child sorted
    const std::size_t jf = static_cast<std::size_t>(best.feature);
    std::vector<std::vector<std::uint32_t>> left_order(d), right_order(d);
    for (std::size_t j = 0; j < d; ++j) {
        auto& src = order[j];
        auto& lo = left_order[j];
        auto& ro = right_order[j];
        for (std::uint32_t r : src) {
            (ctx.X(r, jf) < best.threshold ? lo : ro).push_back(r);
        }
        src.clear();
        src.shrink_to_fit();
    }
    node->left = fit_node(ctx, left_order, depth + 1);
    left_order.clear();
    node->right = fit_node(ctx, right_order, depth + 1);
    return node;
}

} // namespace

std::unique_ptr<TreeNode> fit_decision_tree(const FeatureMatrix& X,
                                            std::span<const double> targets,
                                            const double* weights,
                                            const std::vector<std::uint32_t>& rows,
                                            const TreeFitOptions& options,
                                            const SortedColumns* presorted) {
    if (rows.empty()) throw DataError("cannot fit a tree on zero rows");
    if (targets.size() != X.n_rows()) {
        throw DataError("targets length does not match the matrix");
    }

    SortedColumns local;
    if (presorted == nullptr) {
        local = SortedColumns::build(X);
        presorted = &local;
    }

    // project the full sorted order down to this fit's rows
    std::vector<std::uint8_t> in_fit(X.n_rows(), 0);
    for (std::uint32_t r : rows) in_fit[r] = 1;
    std::vector<std::vector<std::uint32_t>> order(X.n_cols());
    for (std::size_t j = 0; j < X.n_cols(); ++j) {
        order[j].reserve(rows.size());
        for (std::uint32_t r : presorted->order[j]) {
            if (in_fit[r]) order[j].push_back(r);
        }
    }

    FitContext ctx{X, targets, weights, options};
    return fit_node(ctx, order, 0);
}

} // namespace rainpipe
