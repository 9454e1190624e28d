#include "rainpipe/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "rainpipe/errors.hpp"
#include "rainpipe/parallel.hpp"
#include "rainpipe/rng.hpp"

namespace rainpipe {

using nlohmann::json;

const char* to_string(ResampleMode mode) {
    switch (mode) {
        case ResampleMode::none: return "none";
        case ResampleMode::undersample_random: return "undersample_random";
        case ResampleMode::undersample_distance: return "undersample_distance";
        case ResampleMode::smote: return "smote";
    }
    return "?";
}

ResampleMode resample_mode_from_string(const std::string& s) {
    if (s == "none") return ResampleMode::none;
    if (s == "undersample_random") return ResampleMode::undersample_random;
    if (s == "undersample_distance") return ResampleMode::undersample_distance;
    if (s == "smote") return ResampleMode::smote;
    throw ConfigError("unknown resample mode '" + s + "'");
}

json ResamplePlan::to_json() const {
    return json{{"mode", to_string(mode)}, {"k_neighbors", k_neighbors}, {"seed", seed}};
}

ResamplePlan ResamplePlan::from_json(const json& j) {
    ResamplePlan plan;
    plan.mode = resample_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("k_neighbors")) plan.k_neighbors = j.at("k_neighbors").get<std::size_t>();
    if (j.contains("seed")) plan.seed = j.at("seed").get<std::uint64_t>();
    if (plan.mode == ResampleMode::smote && plan.k_neighbors < 1) {
        throw ConfigError("smote requires k_neighbors >= 1");
    }
    return plan;
}

namespace {

struct ClassSplit {
    std::vector<std::size_t> majority;
    std::vector<std::size_t> minority;
    std::uint8_t minority_label = 1;
};

// Partitions row indices by class; the smaller class is the minority,
// with the positive class chosen on an exact tie.
ClassSplit split_classes(const LabelVector& y) {
    ClassSplit s;
    std::vector<std::size_t> zeros, ones;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] ? ones : zeros).push_back(i);
    if (zeros.empty() || ones.empty()) {
        throw DataError("resampling needs both classes present");
    }
    if (ones.size() <= zeros.size()) {
        s.minority = std::move(ones);
        s.majority = std::move(zeros);
        s.minority_label = 1;
    } else {
        s.minority = std::move(zeros);
        s.majority = std::move(ones);
        s.minority_label = 0;
    }
    return s;
}

std::pair<FeatureMatrix, LabelVector> take(const FeatureMatrix& X, const LabelVector& y,
                                           std::vector<std::size_t> rows) {
    std::sort(rows.begin(), rows.end());
    return {X.take_rows(rows), y.take_rows(rows)};
}

} // namespace

std::pair<FeatureMatrix, LabelVector> undersample(const FeatureMatrix& X, const LabelVector& y,
                                                  const ResamplePlan& plan) {
    if (plan.mode != ResampleMode::undersample_random &&
        plan.mode != ResampleMode::undersample_distance) {
        throw ConfigError("undersample called with mode " + std::string(to_string(plan.mode)));
    }
    ClassSplit cls = split_classes(y);
    const std::size_t n_min = cls.minority.size();

    std::vector<std::size_t> kept_majority;
    if (plan.mode == ResampleMode::undersample_random) {
        Rng rng(plan.seed);
        auto picks = rng.sample_without_replacement(cls.majority.size(), n_min);
        kept_majority.reserve(n_min);
        for (std::size_t p : picks) kept_majority.push_back(cls.majority[p]);
    } else {
        // mean distance from each majority row to its (up to) 3 nearest
        // minority neighbors; the farthest majority rows survive
        const std::size_t k = std::min<std::size_t>(3, n_min);
        std::vector<double> mean_dist(cls.majority.size());
        parallel_for(cls.majority.size(), [&](std::size_t m) {
            thread_local std::vector<double> d2;
            d2.resize(n_min);
            const auto row = X.row(cls.majority[m]);
            for (std::size_t q = 0; q < n_min; ++q) {
                d2[q] = squared_distance(row, X.row(cls.minority[q]));
            }
            std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(k - 1),
                             d2.end());
            std::sort(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(k));
            double sum = 0.0;
            for (std::size_t q = 0; q < k; ++q) sum += std::sqrt(d2[q]);
            mean_dist[m] = sum / static_cast<double>(k);
        });
        std::vector<std::size_t> order(cls.majority.size());
        std::iota(order.begin(), order.end(), 0);
        // largest distance first; equal distances keep the lower row index
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return mean_dist[a] > mean_dist[b];
        });
        kept_majority.reserve(n_min);
        for (std::size_t r = 0; r < n_min; ++r) kept_majority.push_back(cls.majority[order[r]]);
    }

    std::vector<std::size_t> rows = std::move(kept_majority);
    rows.insert(rows.end(), cls.minority.begin(), cls.minority.end());
    return take(X, y, std::move(rows));
}

std::pair<FeatureMatrix, LabelVector> smote(const FeatureMatrix& X, const LabelVector& y,
                                            const ResamplePlan& plan) {
    if (plan.mode != ResampleMode::smote) {
        throw ConfigError("smote called with mode " + std::string(to_string(plan.mode)));
    }
    ClassSplit cls = split_classes(y);
    const std::size_t n_min = cls.minority.size();
    const std::size_t k = plan.k_neighbors;
    if (k < 1) throw ConfigError("smote requires k_neighbors >= 1");
    if (n_min <= k) {
        throw DataError("smote needs more than k_neighbors = " + std::to_string(k) +
                        " minority rows, got " + std::to_string(n_min) +
                        "; lower k_neighbors");
    }
    const std::size_t n_needed = cls.majority.size() - n_min;

    // exact k nearest minority neighbors per minority row, excluding self;
    // ties broken by (squared distance, row position) so results are a
    // total order independent of schedule
    std::vector<std::vector<std::size_t>> neighbors(n_min);
    parallel_for(n_min, [&](std::size_t q) {
        thread_local std::vector<std::pair<double, std::size_t>> cand;
        cand.clear();
        const auto row = X.row(cls.minority[q]);
        for (std::size_t r = 0; r < n_min; ++r) {
            if (r == q) continue;
            cand.emplace_back(squared_distance(row, X.row(cls.minority[r])), r);
        }
        std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         cand.end());
        cand.resize(k);
        std::sort(cand.begin(), cand.end());
        neighbors[q].reserve(k);
        for (const auto& [d2, r] : cand) neighbors[q].push_back(r);
    });

    // round-robin over a seeded shuffle of the minority rows
    std::vector<std::size_t> visit(n_min);
    std::iota(visit.begin(), visit.end(), 0);
    Rng shuffle_rng(mix_seed(plan.seed, 0));
    shuffle_rng.shuffle(visit);

    const std::size_t d = X.n_cols();
    FeatureMatrix out(X.n_rows() + n_needed, X.col_names());
    std::copy(X.values().begin(), X.values().end(), out.values().begin());
    LabelVector labels;
    labels.positive_meaning = y.positive_meaning;
    labels.values = y.values;
    labels.values.resize(y.size() + n_needed, cls.minority_label);

    for (std::size_t t = 0; t < n_needed; ++t) {
        const std::size_t q = visit[t % n_min];
        // one private RNG stream per synthetic row: reproducible no matter
        // how the loop is scheduled or resumed
        Rng rt(mix_seed(plan.seed, t + 1));
        const std::size_t z = neighbors[q][rt.bounded(k)];
        const double u = rt.uniform01();
        const auto xr = X.row(cls.minority[q]);
        const auto zr = X.row(cls.minority[z]);
        auto dst = out.row(X.n_rows() + t);
        for (std::size_t j = 0; j < d; ++j) dst[j] = xr[j] + u * (zr[j] - xr[j]);
    }
    return {std::move(out), std::move(labels)};
}

std::pair<FeatureMatrix, LabelVector> apply_resample(const FeatureMatrix& X, const LabelVector& y,
                                                     const ResamplePlan& plan) {
    switch (plan.mode) {
        case ResampleMode::none: return {X, y};
        case ResampleMode::undersample_random:
        case ResampleMode::undersample_distance: return undersample(X, y, plan);
        case ResampleMode::smote: return smote(X, y, plan);
    }
    throw ConfigError("unknown resample mode");
}

} // namespace rainpipe
