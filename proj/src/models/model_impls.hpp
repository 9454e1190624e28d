#pragma once

// Concrete classifier implementations, shared between the factory and the
// per-model translation units. Not part of the public interface.

#include <map>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "rainpipe/models.hpp"
#include "rainpipe/tree.hpp"

namespace rainpipe::impl {

using nlohmann::json;

// Numerically safe logistic helpers, shared by several models.
double sigmoid(double z);
double softplus(double z); // ln(1 + e^z) without overflow

class LogregModel final : public Classifier {
public:
    explicit LogregModel(const ClassifierSpec& spec);

    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    ModelKind kind() const override { return ModelKind::logreg; }
    json to_json() const override;
    static std::unique_ptr<LogregModel> from_json(const json& j);

private:
    ClassifierSpec spec_;
    double learning_rate_;
    std::size_t n_iters_;
    double l2_;
    std::vector<double> weights_;
    double bias_ = 0.0;
};

class TreeModel final : public Classifier {
public:
    explicit TreeModel(const ClassifierSpec& spec);

    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    ModelKind kind() const override { return ModelKind::tree; }
    json to_json() const override;
    static std::unique_ptr<TreeModel> from_json(const json& j);

private:
    ClassifierSpec spec_;
    std::size_t max_depth_;
    std::size_t min_samples_split_;
    std::unique_ptr<TreeNode> root_;
};

class KnnModel final : public Classifier {
public:
    explicit KnnModel(const ClassifierSpec& spec);

    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    std::vector<std::uint8_t> predict(const FeatureMatrix& X) const override;
    ModelKind kind() const override { return ModelKind::knn; }
    json to_json() const override;
    static std::unique_ptr<KnnModel> from_json(const json& j);

private:
    // score plus the information needed to resolve an exact 0.5 vote:
    // which class's members among the k sit cumulatively nearer
    struct Vote {
        double fraction = 0.0;
        std::uint8_t half_vote_class = 1;
    };
    Vote vote_row(std::span<const double> q) const;

    ClassifierSpec spec_;
    std::size_t k_;
    FeatureMatrix train_;
    LabelVector labels_;
};

class DecisionTableModel final : public Classifier {
public:
    explicit DecisionTableModel(const ClassifierSpec& spec);

    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    ModelKind kind() const override { return ModelKind::decision_table; }
    json to_json() const override;
    static std::unique_ptr<DecisionTableModel> from_json(const json& j);

    const std::vector<std::size_t>& selected_features() const { return subset_; }

private:
    std::vector<int> bin_tuple(std::span<const double> row) const;

    ClassifierSpec spec_;
    std::size_t n_bins_;
    std::size_t max_subset_size_;
    std::size_t cv_folds_;
    std::vector<std::size_t> subset_;            // ascending feature indices
    std::vector<std::vector<double>> bin_edges_; // parallel to subset_
    std::map<std::vector<int>, std::pair<double, std::size_t>> table_;
    double default_fraction_ = 0.0;
};

class ForestModel final : public Classifier {
public:
    explicit ForestModel(const ClassifierSpec& spec);

    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    ModelKind kind() const override { return ModelKind::random_forest; }
    json to_json() const override;
    static std::unique_ptr<ForestModel> from_json(const json& j);

private:
    ClassifierSpec spec_;
    std::size_t n_estimators_;
    std::size_t max_depth_;
    std::string max_features_; // "sqrt", "all", or a number
    bool bootstrap_;
    std::vector<std::unique_ptr<TreeNode>> trees_;
};

class AdaBoostModel final : public Classifier {
public:
    explicit AdaBoostModel(const ClassifierSpec& spec);

    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    ModelKind kind() const override { return ModelKind::adaboost; }
    json to_json() const override;
    static std::unique_ptr<AdaBoostModel> from_json(const json& j);

    const std::vector<BoostRound>& rounds() const { return rounds_; }

private:
    double margin_row(std::span<const double> x) const; // sum of alpha * h(x)

    ClassifierSpec spec_;
    std::size_t n_estimators_;
    std::vector<std::unique_ptr<TreeNode>> stumps_;
    std::vector<double> alphas_;
    std::vector<BoostRound> rounds_;
};

class GbmModel final : public Classifier {
public:
    explicit GbmModel(const ClassifierSpec& spec);

    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    ModelKind kind() const override { return ModelKind::gbm; }
    json to_json() const override;
    static std::unique_ptr<GbmModel> from_json(const json& j);

    const std::vector<double>& logloss_trace() const { return logloss_trace_; }

private:
    ClassifierSpec spec_;
    std::size_t n_estimators_;
    double learning_rate_;
    std::size_t max_depth_;
    std::size_t max_features_;
    double f0_ = 0.0;
    std::vector<std::unique_ptr<TreeNode>> trees_;
    std::vector<double> logloss_trace_;
};

} // namespace rainpipe::impl
