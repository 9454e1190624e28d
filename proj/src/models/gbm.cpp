#include <cmath>
#include <map>
#include <numeric>

#include "rainpipe/errors.hpp"
#include "rainpipe/parallel.hpp"
#include "rainpipe/rng.hpp"

#include "model_impls.hpp"

namespace rainpipe::impl {

namespace {
constexpr double kLeafClamp = 4.0; // Newton steps on near-pure leaves stay bounded
}

GbmModel::GbmModel(const ClassifierSpec& spec)
    : spec_(spec),
      n_estimators_(spec.hyperparameters.value("n_estimators", std::size_t{100})),
      learning_rate_(spec.hyperparameters.value("learning_rate", 0.1)),
      max_depth_(spec.hyperparameters.value("max_depth", std::size_t{2})),
      max_features_(spec.hyperparameters.value("max_features", std::size_t{2})) {}

void GbmModel::fit(const FeatureMatrix& X, const LabelVector& y) {
    if (y.size() != X.n_rows()) throw DataError("labels length does not match the matrix");
    const std::size_t n = X.n_rows();
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) positives += y[i];
    if (positives == 0 || positives == n) {
        throw DataError("boosting needs both classes present");
    }
    const double p_bar = static_cast<double>(positives) / static_cast<double>(n);
    f0_ = std::log(p_bar / (1.0 - p_bar));

    const SortedColumns presorted = SortedColumns::build(X);
    std::vector<std::uint32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0u);

    std::vector<double> f(n, f0_);
    std::vector<double> residuals(n);
    trees_.clear();
    logloss_trace_.clear();

    auto logloss = [&]() {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // -[y ln sigma(f) + (1-y) ln(1 - sigma(f))] = softplus(f) - y f
            loss += softplus(f[i]) - (y[i] ? f[i] : 0.0);
        }
        return loss / static_cast<double>(n);
    };

    TreeFitOptions options;
    options.criterion = SplitCriterion::sse;
    options.max_depth = max_depth_;
    options.max_features = max_features_ < X.n_cols() ? max_features_ : 0;

    for (std::size_t t = 0; t < n_estimators_; ++t) {
        for (std::size_t i = 0; i < n; ++i) residuals[i] = y[i] - sigmoid(f[i]);

        Rng rng(mix_seed(spec_.seed, t));
        options.rng = &rng;
        auto tree = fit_decision_tree(X, residuals, nullptr, rows, options, &presorted);

        // replace each leaf's fitted mean with the Newton step
        // sum(residual) / sum(p (1 - p)), clamped
        std::map<TreeNode*, std::pair<double, double>> leaf_stats; // num, den
        std::vector<TreeNode*> leaf_of(n);
        for (std::size_t i = 0; i < n; ++i) {
            TreeNode* leaf = tree->leaf_for(X.row(i));
            const double p = sigmoid(f[i]);
            auto& cell = leaf_stats[leaf];
            cell.first += residuals[i];
            cell.second += p * (1.0 - p);
            leaf_of[i] = leaf;
        }
        for (auto& [leaf, cell] : leaf_stats) {
            double value = cell.second > 0.0 ? cell.first / cell.second : 0.0;
            leaf->value = std::clamp(value, -kLeafClamp, kLeafClamp);
        }

        for (std::size_t i = 0; i < n; ++i) f[i] += learning_rate_ * leaf_of[i]->value;
        trees_.push_back(std::move(tree));
        logloss_trace_.push_back(logloss());
    }
}

std::vector<double> GbmModel::score(const FeatureMatrix& X) const {
    std::vector<double> out(X.n_rows());
    parallel_for(X.n_rows(), [&](std::size_t i) {
        const auto row = X.row(i);
        double f = f0_;
        for (const auto& tree : trees_) f += learning_rate_ * tree->predict_row(row);
        out[i] = sigmoid(f);
    });
    return out;
}

json GbmModel::to_json() const {
    json trees = json::array();
    for (const auto& tree : trees_) trees.push_back(tree_to_json(*tree));
    return json{{"kind", "gbm"},
                {"spec", spec_.to_json()},
                {"f0", f0_},
                {"trees", std::move(trees)},
                {"logloss_trace", logloss_trace_}};
}

std::unique_ptr<GbmModel> GbmModel::from_json(const json& j) {
    auto model = std::make_unique<GbmModel>(ClassifierSpec::from_json(j.at("spec")));
    model->f0_ = j.at("f0").get<double>();
    for (const auto& tree : j.at("trees")) model->trees_.push_back(tree_from_json(tree));
    model->logloss_trace_ = j.at("logloss_trace").get<std::vector<double>>();
    return model;
}

} // namespace rainpipe::impl
