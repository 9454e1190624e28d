#include <cmath>
#include <numeric>

#include "rainpipe/errors.hpp"
#include "rainpipe/parallel.hpp"
#include "rainpipe/rng.hpp"

#include "model_impls.hpp"

namespace rainpipe::impl {

ForestModel::ForestModel(const ClassifierSpec& spec)
    : spec_(spec),
      n_estimators_(spec.hyperparameters.value("n_estimators", std::size_t{100})),
      max_depth_(spec.hyperparameters.value("max_depth", std::size_t{4})),
      bootstrap_(spec.hyperparameters.value("bootstrap", true)) {
    const json& mf = spec.hyperparameters.contains("max_features")
                         ? spec.hyperparameters.at("max_features")
                         : json("sqrt");
    max_features_ = mf.is_string() ? mf.get<std::string>() : mf.dump();
}

void ForestModel::fit(const FeatureMatrix& X, const LabelVector& y) {
    if (X.n_rows() < 2) throw DataError("need at least 2 rows");
    if (y.size() != X.n_rows()) throw DataError("labels length does not match the matrix");
    const std::size_t n = X.n_rows();
    const std::size_t d = X.n_cols();

    std::size_t subset_size = 0; // 0 = all features
    if (max_features_ == "sqrt") {
        subset_size = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    } else if (max_features_ != "all") {
        subset_size = std::stoul(max_features_);
    }
    if (subset_size >= d) subset_size = 0;

    const std::vector<double> targets(y.values.begin(), y.values.end());
    const SortedColumns presorted = SortedColumns::build(X);

    trees_.clear();
    trees_.resize(n_estimators_);
    parallel_for(n_estimators_, [&](std::size_t t) {
        // one private stream per tree: the bootstrap draw and every
        // per-split feature draw come from it, so trees are independent
        // of fit order
        Rng rng(mix_seed(spec_.seed, t));
        std::vector<std::uint32_t> rows;
        std::vector<double> weights;
        const double* weight_ptr = nullptr;
        if (bootstrap_) {
            // multiplicity-as-weight keeps the presorted row lists usable
            std::vector<std::uint32_t> counts(n, 0);
            for (std::size_t i = 0; i < n; ++i) ++counts[rng.bounded(n)];
            weights.assign(n, 0.0);
            for (std::uint32_t r = 0; r < n; ++r) {
                if (counts[r] > 0) {
                    rows.push_back(r);
                    weights[r] = counts[r];
                }
            }
            weight_ptr = weights.data();
        } else {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), 0u);
        }
        TreeFitOptions options;
        options.criterion = SplitCriterion::gini;
        options.max_depth = max_depth_;
        options.max_features = subset_size;
        options.rng = &rng;
        trees_[t] = fit_decision_tree(X, targets, weight_ptr, rows, options, &presorted);
    });
}

std::vector<double> ForestModel::score(const FeatureMatrix& X) const {
    if (trees_.empty()) throw DataError("model is not fitted");
    std::vector<double> out(X.n_rows());
    parallel_for(X.n_rows(), [&](std::size_t i) {
        const auto row = X.row(i);
        double sum = 0.0;
        for (const auto& tree : trees_) sum += tree->predict_row(row);
        out[i] = sum / static_cast<double>(trees_.size());
    });
    return out;
}

json ForestModel::to_json() const {
    json trees = json::array();
    for (const auto& tree : trees_) trees.push_back(tree_to_json(*tree));
    return json{{"kind", "random_forest"}, {"spec", spec_.to_json()}, {"trees", std::move(trees)}};
}

std::unique_ptr<ForestModel> ForestModel::from_json(const json& j) {
    auto model = std::make_unique<ForestModel>(ClassifierSpec::from_json(j.at("spec")));
    for (const auto& tree : j.at("trees")) model->trees_.push_back(tree_from_json(tree));
    return model;
}

} // namespace rainpipe::impl
