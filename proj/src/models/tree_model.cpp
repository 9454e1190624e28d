#include <numeric>

#include "rainpipe/errors.hpp"
#include "rainpipe/parallel.hpp"

#include "model_impls.hpp"

namespace rainpipe::impl {

TreeModel::TreeModel(const ClassifierSpec& spec)
    : spec_(spec),
      max_depth_(spec.hyperparameters.value("max_depth", std::size_t{0})),
      min_samples_split_(spec.hyperparameters.value("min_samples_split", std::size_t{2})) {}

void TreeModel::fit(const FeatureMatrix& X, const LabelVector& y) {
    if (X.n_rows() == 0) throw DataError("cannot fit on zero rows");
    if (y.size() != X.n_rows()) throw DataError("labels length does not match the matrix");
    std::vector<double> targets(y.values.begin(), y.values.end());
    std::vector<std::uint32_t> rows(X.n_rows());
    std::iota(rows.begin(), rows.end(), 0u);
    TreeFitOptions options;
    options.criterion = SplitCriterion::gini;
    options.max_depth = max_depth_;
    options.min_samples_split = min_samples_split_;
    root_ = fit_decision_tree(X, targets, nullptr, rows, options);
}

std::vector<double> TreeModel::score(const FeatureMatrix& X) const {
    if (!root_) throw DataError("model is not fitted");
    std::vector<double> out(X.n_rows());
    parallel_for(X.n_rows(), [&](std::size_t i) { out[i] = root_->predict_row(X.row(i)); });
    return out;
}

json TreeModel::to_json() const {
    return json{{"kind", "tree"}, {"spec", spec_.to_json()}, {"tree", tree_to_json(*root_)}};
}

std::unique_ptr<TreeModel> TreeModel::from_json(const json& j) {
    auto model = std::make_unique<TreeModel>(ClassifierSpec::from_json(j.at("spec")));
    model->root_ = tree_from_json(j.at("tree"));
    return model;
}

} // namespace rainpipe::impl
