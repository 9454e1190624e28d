#include <algorithm>
#include <cmath>

#include "rainpipe/errors.hpp"
#include "rainpipe/parallel.hpp"

#include "model_impls.hpp"

namespace rainpipe::impl {

KnnModel::KnnModel(const ClassifierSpec& spec)
    : spec_(spec), k_(spec.hyperparameters.value("k", std::size_t{25})) {}

void KnnModel::fit(const FeatureMatrix& X, const LabelVector& y) {
    if (y.size() != X.n_rows()) throw DataError("labels length does not match the matrix");
    if (k_ > X.n_rows()) {
        throw DataError("k = " + std::to_string(k_) + " exceeds the " +
                        std::to_string(X.n_rows()) + " training rows");
    }
    train_ = X;
    labels_ = y;
}

// The k nearest training rows under the total order (squared distance,
// row index); the index part makes distance ties deterministic.
KnnModel::Vote KnnModel::vote_row(std::span<const double> q) const {
    using Entry = std::pair<double, std::uint32_t>;
    // bounded max-heap: the worst of the current best k sits on top
    std::vector<Entry> heap;
    heap.reserve(k_ + 1);
    for (std::uint32_t r = 0; r < train_.n_rows(); ++r) {
        Entry cand{squared_distance(q, train_.row(r)), r};
        if (heap.size() < k_) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end());
        }
    }
    std::sort(heap.begin(), heap.end());

    std::size_t ones = 0;
    double dist_to_one = 0.0, dist_to_zero = 0.0;
    for (const auto& [d2, r] : heap) {
        if (labels_[r]) {
            ++ones;
            dist_to_one += std::sqrt(d2);
        } else {
            dist_to_zero += std::sqrt(d2);
        }
    }
    Vote v;
    v.fraction = static_cast<double>(ones) / static_cast<double>(k_);
    // on an exact half vote, the class whose members are cumulatively
    // nearer wins; equality keeps class 1 (consistent with score >= 0.5)
    v.half_vote_class = dist_to_one <= dist_to_zero ? 1 : 0;
    return v;
}

std::vector<double> KnnModel::score(const FeatureMatrix& X) const {
    if (train_.n_rows() == 0) throw DataError("model is not fitted");
    if (X.n_cols() != train_.n_cols()) throw DataError("feature count mismatch");
    std::vector<double> out(X.n_rows());
    parallel_for(X.n_rows(), [&](std::size_t i) { out[i] = vote_row(X.row(i)).fraction; });
    return out;
}

std::vector<std::uint8_t> KnnModel::predict(const FeatureMatrix& X) const {
    if (train_.n_rows() == 0) throw DataError("model is not fitted");
    if (X.n_cols() != train_.n_cols()) throw DataError("feature count mismatch");
    std::vector<std::uint8_t> out(X.n_rows());
    parallel_for(X.n_rows(), [&](std::size_t i) {
        const Vote v = vote_row(X.row(i));
        if (v.fraction > 0.5) {
            out[i] = 1;
        } else if (v.fraction < 0.5) {
            out[i] = 0;
        } else {
            out[i] = v.half_vote_class;
        }
    });
    return out;
}

json KnnModel::to_json() const {
    return json{{"kind", "knn"},
                {"spec", spec_.to_json()},
                {"col_names", train_.col_names()},
                {"train_values", train_.values()},
                {"train_labels", labels_.values},
                {"positive_meaning", labels_.positive_meaning}};
}

std::unique_ptr<KnnModel> KnnModel::from_json(const json& j) {
    auto model = std::make_unique<KnnModel>(ClassifierSpec::from_json(j.at("spec")));
    const auto names = j.at("col_names").get<std::vector<std::string>>();
    const auto values = j.at("train_values").get<std::vector<double>>();
    model->train_ = FeatureMatrix(names.empty() ? 0 : values.size() / names.size(), names);
    model->train_.values() = values;
    model->labels_.values = j.at("train_labels").get<std::vector<std::uint8_t>>();
    model->labels_.positive_meaning = j.at("positive_meaning").get<std::string>();
    return model;
}

} // namespace rainpipe::impl
