#include <cmath>

#include "rainpipe/errors.hpp"
#include "rainpipe/parallel.hpp"

#include "model_impls.hpp"

namespace rainpipe {

// Mean cross-entropy with an L2 ridge term: (1/n) [ Σ_i softplus(z_i) − y_i z_i
// + (l2/2) ||w||² ], z_i = w·x_i + b. The bias is unpenalized.
double logreg_loss(const FeatureMatrix& X, const LabelVector& y,
                   const std::vector<double>& weights, double bias, double l2) {
    const std::size_t n = X.n_rows();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double z = bias;
        const auto row = X.row(i);
        for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * row[j];
        loss += impl::softplus(z) - (y[i] ? z : 0.0);
    }
    double penalty = 0.0;
    for (double w : weights) penalty += w * w;
    return (loss + 0.5 * l2 * penalty) / static_cast<double>(n);
}

LogregGradient logreg_gradient(const FeatureMatrix& X, const LabelVector& y,
                               const std::vector<double>& weights, double bias, double l2) {
    const std::size_t n = X.n_rows();
    LogregGradient g;
    g.d_weights.assign(weights.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double z = bias;
        const auto row = X.row(i);
        for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * row[j];
        const double residual = impl::sigmoid(z) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < weights.size(); ++j) g.d_weights[j] += residual * row[j];
        g.d_bias += residual;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < weights.size(); ++j) {
        g.d_weights[j] = (g.d_weights[j] + l2 * weights[j]) * inv_n;
    }
    g.d_bias *= inv_n;
    return g;
}

namespace impl {

LogregModel::LogregModel(const ClassifierSpec& spec)
    : spec_(spec),
      learning_rate_(spec.hyperparameters.value("learning_rate", 0.1)),
      n_iters_(spec.hyperparameters.value("n_iters", std::size_t{1000})),
      l2_(spec.hyperparameters.value("l2", 0.0)) {}

void LogregModel::fit(const FeatureMatrix& X, const LabelVector& y) {
    if (X.n_rows() == 0) throw DataError("cannot fit on zero rows");
    if (y.size() != X.n_rows()) throw DataError("labels length does not match the matrix");
    weights_.assign(X.n_cols(), 0.0);
    bias_ = 0.0;
    for (std::size_t iter = 0; iter < n_iters_; ++iter) {
        const LogregGradient g = logreg_gradient(X, y, weights_, bias_, l2_);
        bool finite = std::isfinite(g.d_bias);
        for (double dw : g.d_weights) finite = finite && std::isfinite(dw);
        if (!finite) {
            throw NumericError("training diverged at iteration " + std::to_string(iter) +
                               "; lower the learning rate");
        }
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            weights_[j] -= learning_rate_ * g.d_weights[j];
        }
        bias_ -= learning_rate_ * g.d_bias;
    }
    const double final_loss = logreg_loss(X, y, weights_, bias_, l2_);
    if (!std::isfinite(final_loss)) {
        throw NumericError("training diverged by iteration " + std::to_string(n_iters_) +
                           "; lower the learning rate");
    }
}

std::vector<double> LogregModel::score(const FeatureMatrix& X) const {
    if (X.n_cols() != weights_.size()) {
        throw DataError("model fitted on " + std::to_string(weights_.size()) +
                        " features, given " + std::to_string(X.n_cols()));
    }
    std::vector<double> out(X.n_rows());
    parallel_for(X.n_rows(), [&](std::size_t i) {
        double z = bias_;
        const auto row = X.row(i);
        for (std::size_t j = 0; j < weights_.size(); ++j) z += weights_[j] * row[j];
        out[i] = sigmoid(z);
    });
    return out;
}

json LogregModel::to_json() const {
    return json{{"kind", "logreg"},
                {"spec", spec_.to_json()},
                {"weights", weights_},
                {"bias", bias_}};
}

std::unique_ptr<LogregModel> LogregModel::from_json(const json& j) {
    auto model = std::make_unique<LogregModel>(ClassifierSpec::from_json(j.at("spec")));
    model->weights_ = j.at("weights").get<std::vector<double>>();
    model->bias_ = j.at("bias").get<double>();
    return model;
}

} // namespace impl

} // namespace rainpipe
