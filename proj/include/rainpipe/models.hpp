#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rainpipe/matrix.hpp"
#include "rainpipe/tree.hpp"

namespace rainpipe {

enum class ModelKind { logreg, tree, knn, decision_table, random_forest, adaboost, gbm };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Declarative description of one classifier. Hyperparameters are a JSON
// object validated per kind before fitting.
struct ClassifierSpec {
    ModelKind kind = ModelKind::logreg;
    nlohmann::json hyperparameters = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::string name; // report label; defaults to the kind string

    std::string display_name() const { return name.empty() ? to_string(kind) : name; }
    void validate() const; // throws ConfigError
    nlohmann::json to_json() const;
    static ClassifierSpec from_json(const nlohmann::json& j);
};

// Uniform contract realized by all seven model families. score() returns
// the per-row probability of class 1; the default predict() thresholds it
// at 0.5 (score >= 0.5 means class 1), which individual models refine
// with their own documented tie rules.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual void fit(const FeatureMatrix& X, const LabelVector& y) = 0;
    virtual std::vector<double> score(const FeatureMatrix& X) const = 0;
    virtual std::vector<std::uint8_t> predict(const FeatureMatrix& X) const;

    virtual ModelKind kind() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

// Builds an unfitted classifier from a validated spec.
std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec);

// Restores a fitted classifier from its serialized form.
std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);

// Logistic-regression internals, exposed so the analytic gradient can be
// checked against finite differences.
struct LogregGradient {
    std::vector<double> d_weights;
    double d_bias = 0.0;
};
double logreg_loss(const FeatureMatrix& X, const LabelVector& y,
                   const std::vector<double>& weights, double bias, double l2);
LogregGradient logreg_gradient(const FeatureMatrix& X, const LabelVector& y,
                               const std::vector<double>& weights, double bias, double l2);

// Per-round AdaBoost trace, exposed for verification of the weight
// recurrence.
struct BoostRound {
    double epsilon = 0.0;
    double alpha = 0.0;
};

// GBM training diagnostics: training log-loss after each round.
std::vector<double> gbm_training_logloss(const Classifier& fitted);
// AdaBoost per-round (epsilon, alpha) trace.
std::vector<BoostRound> adaboost_trace(const Classifier& fitted);

} // namespace rainpipe
