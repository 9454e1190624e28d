#include <cmath>
#include <numeric>

#include "rainpipe/errors.hpp"
#include "rainpipe/parallel.hpp"

#include "model_impls.hpp"

namespace rainpipe::impl {

namespace {

// A stump's leaf holds a weighted class-1 fraction; the boosted vote is
// its sign decision in {-1, +1}.
double stump_vote(const TreeNode& stump, std::span<const double> x) {
    return stump.predict_row(x) >= 0.5 ? 1.0 : -1.0;
}

// alpha used when a stump is perfect: epsilon pinned to 1e-10
const double kPerfectAlpha = 0.5 * std::log((1.0 - 1e-10) / 1e-10);

} // namespace

AdaBoostModel::AdaBoostModel(const ClassifierSpec& spec)
    : spec_(spec),
      n_estimators_(spec.hyperparameters.value("n_estimators", std::size_t{50})) {}

void AdaBoostModel::fit(const FeatureMatrix& X, const LabelVector& y) {
    if (y.size() != X.n_rows()) throw DataError("labels length does not match the matrix");
    const std::size_t n = X.n_rows();
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) positives += y[i];
    if (positives == 0 || positives == n) {
        throw DataError("boosting needs both classes present");
    }

    const std::vector<double> targets(y.values.begin(), y.values.end());
    const SortedColumns presorted = SortedColumns::build(X);
    std::vector<std::uint32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0u);

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    stumps_.clear();
    alphas_.clear();
    rounds_.clear();

    TreeFitOptions options;
    options.criterion = SplitCriterion::gini;
    options.max_depth = 1;

    for (std::size_t t = 0; t < n_estimators_; ++t) {
        auto stump = fit_decision_tree(X, targets, w.data(), rows, options, &presorted);

        double epsilon = 0.0;
        std::vector<double> votes(n);
        for (std::size_t i = 0; i < n; ++i) {
            votes[i] = stump_vote(*stump, X.row(i));
            const double yi = y[i] ? 1.0 : -1.0;
            if (votes[i] != yi) epsilon += w[i];
        }

        if (epsilon >= 0.5) break; // no better than chance: discard and stop

        if (epsilon == 0.0) {
            stumps_.push_back(std::move(stump));
            alphas_.push_back(kPerfectAlpha);
            rounds_.push_back({0.0, kPerfectAlpha});
            break; // a perfect stump ends the ensemble
        }

        const double alpha = 0.5 * std::log((1.0 - epsilon) / epsilon);
        stumps_.push_back(std::move(stump));
        alphas_.push_back(alpha);
        rounds_.push_back({epsilon, alpha});

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double yi = y[i] ? 1.0 : -1.0;
            w[i] *= std::exp(-alpha * yi * votes[i]);
            sum += w[i];
        }
        for (double& wi : w) wi /= sum;
    }
}

double AdaBoostModel::margin_row(std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t t = 0; t < stumps_.size(); ++t) {
        sum += alphas_[t] * stump_vote(*stumps_[t], x);
    }
    return sum;
}

std::vector<double> AdaBoostModel::score(const FeatureMatrix& X) const {
    std::vector<double> out(X.n_rows());
    parallel_for(X.n_rows(), [&](std::size_t i) { out[i] = sigmoid(2.0 * margin_row(X.row(i))); });
    return out;
}

json AdaBoostModel::to_json() const {
    json stumps = json::array();
    for (const auto& stump : stumps_) stumps.push_back(tree_to_json(*stump));
    json rounds = json::array();
    for (const auto& r : rounds_) {
        rounds.push_back(json{{"epsilon", r.epsilon}, {"alpha", r.alpha}});
    }
    return json{{"kind", "adaboost"},
                {"spec", spec_.to_json()},
                {"stumps", std::move(stumps)},
                {"alphas", alphas_},
                {"rounds", std::move(rounds)}};
}

std::unique_ptr<AdaBoostModel> AdaBoostModel::from_json(const json& j) {
    auto model = std::make_unique<AdaBoostModel>(ClassifierSpec::from_json(j.at("spec")));
    for (const auto& stump : j.at("stumps")) model->stumps_.push_back(tree_from_json(stump));
    model->alphas_ = j.at("alphas").get<std::vector<double>>();
    for (const auto& r : j.at("rounds")) {
        model->rounds_.push_back({r.at("epsilon").get<double>(), r.at("alpha").get<double>()});
    }
    return model;
}

} // namespace rainpipe::impl
