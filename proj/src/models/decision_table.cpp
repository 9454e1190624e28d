#include <algorithm>
#include <numeric>

#include "rainpipe/errors.hpp"
#include "rainpipe/eval.hpp"

#include "model_impls.hpp"

namespace rainpipe::impl {

namespace {

// Equal-frequency cut points for one column: the sorted value at each
// fold of n/n_bins, deduplicated. A value x lands in bin = number of
// edges <= x, so identical values always share a bin.
std::vector<double> equal_frequency_edges(std::vector<double> values, std::size_t n_bins) {
    std::sort(values.begin(), values.end());
    std::vector<double> edges;
    for (std::size_t b = 1; b < n_bins; ++b) {
        edges.push_back(values[b * values.size() / n_bins]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

int bin_of(double x, const std::vector<double>& edges) {
    return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
}

// Plain tuple -> (positives, count) table over the given rows.
using Tally = std::map<std::vector<int>, std::pair<std::size_t, std::size_t>>;

} // namespace

DecisionTableModel::DecisionTableModel(const ClassifierSpec& spec)
    : spec_(spec),
      n_bins_(spec.hyperparameters.value("n_bins", std::size_t{10})),
      max_subset_size_(spec.hyperparameters.value("max_subset_size", std::size_t{4})),
      cv_folds_(spec.hyperparameters.value("cv_folds", std::size_t{5})) {}

void DecisionTableModel::fit(const FeatureMatrix& X, const LabelVector& y) {
    if (y.size() != X.n_rows()) throw DataError("labels length does not match the matrix");
    if (X.n_rows() < cv_folds_) {
        throw DataError("need at least cv_folds = " + std::to_string(cv_folds_) + " rows, got " +
                        std::to_string(X.n_rows()));
    }
    const std::size_t n = X.n_rows();
    const std::size_t d = X.n_cols();

    // bin every feature once; candidate subsets reuse these codes
    std::vector<std::vector<double>> all_edges(d);
    std::vector<std::vector<int>> codes(d, std::vector<int>(n));
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = X(i, j);
        all_edges[j] = equal_frequency_edges(std::move(col), n_bins_);
        for (std::size_t i = 0; i < n; ++i) codes[j][i] = bin_of(X(i, j), all_edges[j]);
    }

    std::size_t global_pos = 0;
    for (std::size_t i = 0; i < n; ++i) global_pos += y[i];
    default_fraction_ = static_cast<double>(global_pos) / static_cast<double>(n);

    // one shared fold assignment keeps every candidate comparison paired
    const FoldPlan folds = stratified_kfold(y, cv_folds_, spec_.seed);

    // cross-validated accuracy of the table over `subset`; the fallback
    // for tuples unseen in a training part is that part's majority class
    auto cv_accuracy = [&](const std::vector<std::size_t>& subset) {
        std::size_t correct = 0;
        for (std::size_t f = 0; f < cv_folds_; ++f) {
            Tally tally;
            std::size_t train_pos = 0, train_n = 0;
            std::vector<int> key(subset.size());
            for (std::size_t i = 0; i < n; ++i) {
                if (folds.fold_of[i] == f) continue;
                for (std::size_t s = 0; s < subset.size(); ++s) key[s] = codes[subset[s]][i];
                auto& cell = tally[key];
                cell.first += y[i];
                ++cell.second;
                train_pos += y[i];
                ++train_n;
            }
            const std::uint8_t fallback =
                2 * train_pos >= train_n ? 1 : 0; // fraction >= 0.5 rounds to 1
            for (std::size_t i = 0; i < n; ++i) {
                if (folds.fold_of[i] != f) continue;
                for (std::size_t s = 0; s < subset.size(); ++s) key[s] = codes[subset[s]][i];
                const auto it = tally.find(key);
                std::uint8_t pred = fallback;
                if (it != tally.end()) {
                    pred = 2 * it->second.first >= it->second.second ? 1 : 0;
                }
                correct += pred == y[i];
            }
        }
        return static_cast<double>(correct) / static_cast<double>(n);
    };

    // greedy forward selection: grow the subset only while CV accuracy
    // strictly improves; candidate ties go to the lower feature index
    subset_.clear();
    double best_accuracy = cv_accuracy({});
    while (subset_.size() < std::min(max_subset_size_, d)) {
        std::size_t best_feature = d;
        double round_best = best_accuracy;
        for (std::size_t j = 0; j < d; ++j) {
            if (std::find(subset_.begin(), subset_.end(), j) != subset_.end()) continue;
            std::vector<std::size_t> trial = subset_;
            trial.push_back(j);
            std::sort(trial.begin(), trial.end());
            const double acc = cv_accuracy(trial);
            if (acc > round_best) {
                round_best = acc;
                best_feature = j;
            }
        }
        if (best_feature == d) break;
        subset_.push_back(best_feature);
        std::sort(subset_.begin(), subset_.end());
        best_accuracy = round_best;
    }

    // final table over all rows with the accepted subset
    bin_edges_.clear();
    for (std::size_t j : subset_) bin_edges_.push_back(all_edges[j]);
    table_.clear();
    Tally tally;
    std::vector<int> key(subset_.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < subset_.size(); ++s) key[s] = codes[subset_[s]][i];
        auto& cell = tally[key];
        cell.first += y[i];
        ++cell.second;
    }
    for (const auto& [tuple, cell] : tally) {
        table_[tuple] = {static_cast<double>(cell.first) / static_cast<double>(cell.second),
                         cell.second};
    }
}

std::vector<int> DecisionTableModel::bin_tuple(std::span<const double> row) const {
    std::vector<int> key(subset_.size());
    for (std::size_t s = 0; s < subset_.size(); ++s) {
        key[s] = bin_of(row[subset_[s]], bin_edges_[s]);
    }
    return key;
}

std::vector<double> DecisionTableModel::score(const FeatureMatrix& X) const {
    std::vector<double> out(X.n_rows());
    for (std::size_t i = 0; i < X.n_rows(); ++i) {
        const auto it = table_.find(bin_tuple(X.row(i)));
        out[i] = it != table_.end() ? it->second.first : default_fraction_;
    }
    return out;
}

json DecisionTableModel::to_json() const {
    json rules = json::array();
    for (const auto& [tuple, cell] : table_) {
        rules.push_back(json{{"bins", tuple}, {"fraction", cell.first}, {"count", cell.second}});
    }
    return json{{"kind", "decision_table"},
                {"spec", spec_.to_json()},
                {"subset", subset_},
                {"bin_edges", bin_edges_},
                {"rules", std::move(rules)},
                {"default_fraction", default_fraction_}};
}

std::unique_ptr<DecisionTableModel> DecisionTableModel::from_json(const json& j) {
    auto model = std::make_unique<DecisionTableModel>(ClassifierSpec::from_json(j.at("spec")));
    model->subset_ = j.at("subset").get<std::vector<std::size_t>>();
    model->bin_edges_ = j.at("bin_edges").get<std::vector<std::vector<double>>>();
    model->default_fraction_ = j.at("default_fraction").get<double>();
    for (const auto& rule : j.at("rules")) {
        model->table_[rule.at("bins").get<std::vector<int>>()] = {
            rule.at("fraction").get<double>(), rule.at("count").get<std::size_t>()};
    }
    return model;
}

} // namespace rainpipe::impl
