#include <cmath>
#include <set>

#include "rainpipe/errors.hpp"

#include "model_impls.hpp"

namespace rainpipe {

using nlohmann::json;

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::logreg: return "logreg";
        case ModelKind::tree: return "tree";
        case ModelKind::knn: return "knn";
        case ModelKind::decision_table: return "decision_table";
        case ModelKind::random_forest: return "random_forest";
        case ModelKind::adaboost: return "adaboost";
        case ModelKind::gbm: return "gbm";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "logreg") return ModelKind::logreg;
    if (s == "tree") return ModelKind::tree;
    if (s == "knn") return ModelKind::knn;
    if (s == "decision_table") return ModelKind::decision_table;
    if (s == "random_forest") return ModelKind::random_forest;
    if (s == "adaboost") return ModelKind::adaboost;
    if (s == "gbm") return ModelKind::gbm;
    throw ConfigError("unknown model kind '" + s + "'");
}

namespace {

// Per-kind hyperparameter checks. Presence is optional (defaults apply);
// unknown keys are rejected so typos cannot silently fall back to defaults.
struct Checker {
    const ModelKind kind;
    const json& hp;
    std::set<std::string> known;

    void positive_number(const char* key) {
        known.insert(key);
        if (!hp.contains(key)) return;
        if (!hp.at(key).is_number() || !(hp.at(key).get<double>() > 0.0)) {
            fail(key, "must be a number > 0");
        }
    }
    void non_negative_number(const char* key) {
        known.insert(key);
        if (!hp.contains(key)) return;
        if (!hp.at(key).is_number() || hp.at(key).get<double>() < 0.0) {
            fail(key, "must be a number >= 0");
        }
    }
    void integer_at_least(const char* key, long long lo) {
        known.insert(key);
        if (!hp.contains(key)) return;
        if (!hp.at(key).is_number_integer() || hp.at(key).get<long long>() < lo) {
            fail(key, "must be an integer >= " + std::to_string(lo));
        }
    }
    void odd_integer(const char* key) {
        known.insert(key);
        if (!hp.contains(key)) return;
        if (!hp.at(key).is_number_integer() || hp.at(key).get<long long>() < 1 ||
            hp.at(key).get<long long>() % 2 == 0) {
            fail(key, "must be an odd integer >= 1");
        }
    }
    void boolean(const char* key) {
        known.insert(key);
        if (!hp.contains(key)) return;
        if (!hp.at(key).is_boolean()) fail(key, "must be a boolean");
    }
    void feature_count(const char* key) {
        known.insert(key);
        if (!hp.contains(key)) return;
        const json& v = hp.at(key);
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s != "sqrt" && s != "all") fail(key, "must be 'sqrt', 'all', or an integer >= 1");
            return;
        }
        if (!v.is_number_integer() || v.get<long long>() < 1) {
            fail(key, "must be 'sqrt', 'all', or an integer >= 1");
        }
    }
    void finish() const {
        for (const auto& [key, value] : hp.items()) {
            if (!known.count(key)) {
                throw ConfigError(std::string(to_string(kind)) +
                                  ": unknown hyperparameter '" + key + "'");
            }
        }
    }
    [[noreturn]] void fail(const char* key, const std::string& what) const {
        throw ConfigError(std::string(to_string(kind)) + ": hyperparameter '" + key + "' " +
                          what);
    }
};

} // namespace

void ClassifierSpec::validate() const {
    if (!hyperparameters.is_object()) {
        throw ConfigError("hyperparameters must be a JSON object");
    }
    Checker c{kind, hyperparameters, {}};
    switch (kind) {
        case ModelKind::logreg:
            c.positive_number("learning_rate");
            c.integer_at_least("n_iters", 1);
            c.non_negative_number("l2");
            break;
        case ModelKind::tree:
            c.integer_at_least("max_depth", 0); // 0 = unlimited
            c.integer_at_least("min_samples_split", 2);
            break;
        case ModelKind::knn:
            c.odd_integer("k");
            break;
        case ModelKind::decision_table:
            c.integer_at_least("n_bins", 2);
            c.integer_at_least("max_subset_size", 1);
            c.integer_at_least("cv_folds", 2);
            break;
        case ModelKind::random_forest:
            c.integer_at_least("n_estimators", 1);
            c.integer_at_least("max_depth", 0);
            c.feature_count("max_features");
            c.boolean("bootstrap");
            break;
        case ModelKind::adaboost:
            c.integer_at_least("n_estimators", 1);
            break;
        case ModelKind::gbm:
            c.integer_at_least("n_estimators", 0); // 0 rounds = prior only
            c.positive_number("learning_rate");
            c.integer_at_least("max_depth", 1);
            c.integer_at_least("max_features", 0); // 0 = all
            break;
    }
    c.finish();
}

json ClassifierSpec::to_json() const {
    return json{{"kind", to_string(kind)},
                {"hyperparameters", hyperparameters},
                {"seed", seed},
                {"name", display_name()}};
}

ClassifierSpec ClassifierSpec::from_json(const json& j) {
    ClassifierSpec spec;
    spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("hyperparameters")) spec.hyperparameters = j.at("hyperparameters");
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    spec.validate();
    return spec;
}

std::vector<std::uint8_t> Classifier::predict(const FeatureMatrix& X) const {
    const std::vector<double> s = score(X);
    std::vector<std::uint8_t> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= 0.5 ? 1 : 0;
    return out;
}

std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case ModelKind::logreg: return std::make_unique<impl::LogregModel>(spec);
        case ModelKind::tree: return std::make_unique<impl::TreeModel>(spec);
        case ModelKind::knn: return std::make_unique<impl::KnnModel>(spec);
        case ModelKind::decision_table: return std::make_unique<impl::DecisionTableModel>(spec);
        case ModelKind::random_forest: return std::make_unique<impl::ForestModel>(spec);
        case ModelKind::adaboost: return std::make_unique<impl::AdaBoostModel>(spec);
        case ModelKind::gbm: return std::make_unique<impl::GbmModel>(spec);
    }
    throw ConfigError("unknown model kind");
}

std::unique_ptr<Classifier> classifier_from_json(const json& j) {
    switch (model_kind_from_string(j.at("kind").get<std::string>())) {
        case ModelKind::logreg: return impl::LogregModel::from_json(j);
        case ModelKind::tree: return impl::TreeModel::from_json(j);
        case ModelKind::knn: return impl::KnnModel::from_json(j);
        case ModelKind::decision_table: return impl::DecisionTableModel::from_json(j);
        case ModelKind::random_forest: return impl::ForestModel::from_json(j);
        case ModelKind::adaboost: return impl::AdaBoostModel::from_json(j);
        case ModelKind::gbm: return impl::GbmModel::from_json(j);
    }
    throw ConfigError("unknown model kind");
}

std::vector<double> gbm_training_logloss(const Classifier& fitted) {
    const auto* gbm = dynamic_cast<const impl::GbmModel*>(&fitted);
    if (gbm == nullptr) throw ConfigError("training log-loss trace is a gbm-only diagnostic");
    return gbm->logloss_trace();
}

std::vector<BoostRound> adaboost_trace(const Classifier& fitted) {
    const auto* ada = dynamic_cast<const impl::AdaBoostModel*>(&fitted);
    if (ada == nullptr) throw ConfigError("round trace is an adaboost-only diagnostic");
    return ada->rounds();
}

namespace impl {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

} // namespace impl

} // namespace rainpipe
