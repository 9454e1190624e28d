#include "rainpipe/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "rainpipe/errors.hpp"

namespace rainpipe {

using nlohmann::json;

namespace {

// Looks up a column and insists on the expected kind.
std::size_t typed_col(const Table& t, const std::string& name, ColumnKind kind) {
    const std::size_t j = t.col_index(name);
    if (t.col_schema(j).kind != kind) {
        throw DataError("column '" + name + "' is " + to_string(t.col_schema(j).kind) +
                        ", expected " + to_string(kind));
    }
    return j;
}

} // namespace

Table expand_date(const Table& table) {
    std::size_t date_col = table.n_cols();
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
        if (table.col_schema(j).kind == ColumnKind::date) {
            date_col = j;
            break;
        }
    }
    if (date_col == table.n_cols()) throw DataError("expand_date: table has no date column");

    const std::size_t n = table.n_rows();
    std::vector<ColumnSchema> schema;
    std::vector<ColumnData> columns;
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
        if (j != date_col) {
            schema.push_back(table.col_schema(j));
            columns.push_back(table.column(j));
            continue;
        }
        for (const char* name : {"Year", "Month", "Day"}) {
            schema.push_back({name, ColumnKind::numeric, true});
            ColumnData col;
            col.numeric.resize(n, 0.0);
            col.missing = table.column(j).missing;
            columns.push_back(std::move(col));
        }
        ColumnData& year = columns[columns.size() - 3];
        ColumnData& month = columns[columns.size() - 2];
        ColumnData& day = columns[columns.size() - 1];
        for (std::size_t i = 0; i < n; ++i) {
            if (table.is_missing(i, j)) continue;
            const Date d = table.date_at(i, j);
            year.numeric[i] = d.year;
            month.numeric[i] = d.month;
            day.numeric[i] = d.day;
        }
    }
    return Table(std::move(schema), std::move(columns), n, table.dropped_unlabeled());
}

Table drop_columns(const Table& table, const std::vector<std::string>& names) {
    std::set<std::size_t> dropped;
    for (const auto& name : names) dropped.insert(table.col_index(name));
    std::vector<ColumnSchema> schema;
    std::vector<ColumnData> columns;
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
        if (dropped.count(j)) continue;
        schema.push_back(table.col_schema(j));
        columns.push_back(table.column(j));
    }
    return Table(std::move(schema), std::move(columns), table.n_rows(),
                 table.dropped_unlabeled());
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// group imputers
// ---------------------------------------------------------------------------

namespace {

// Shared fit scaffolding: walks `rows` and hands each usable observation to
// `accumulate(location, month, row)`; rows with a missing value cell are
// skipped by the caller's accumulator as needed.
template <typename Fn>
void for_each_grouped_row(const Table& t, std::size_t loc_col, std::size_t date_col,
                          const std::vector<std::size_t>& rows, Fn&& fn) {
    for (std::size_t i : rows) {
        std::optional<std::string> loc;
        std::optional<int> month;
        if (!t.is_missing(i, loc_col)) loc = t.category_name(loc_col, t.cat_id_at(i, loc_col));
        if (!t.is_missing(i, date_col)) month = t.date_at(i, date_col).month;
        fn(i, loc, month);
    }
}

} // namespace

GroupMeanImputer GroupMeanImputer::fit(const Table& table, const std::string& value_col,
                                       const std::string& location_col,
                                       const std::string& date_col,
                                       const std::vector<std::size_t>& rows) {
    const std::size_t vj = typed_col(table, value_col, ColumnKind::numeric);
    const std::size_t lj = typed_col(table, location_col, ColumnKind::categorical);
    const std::size_t dj = typed_col(table, date_col, ColumnKind::date);

    GroupMeanImputer imp;
    imp.value_col_ = value_col;
    imp.location_col_ = location_col;
    imp.date_col_ = date_col;

    std::map<std::string, std::map<int, std::pair<double, std::size_t>>> acc;
    double global_sum = 0.0;
    std::size_t global_n = 0;
    for_each_grouped_row(table, lj, dj, rows,
                         [&](std::size_t i, const std::optional<std::string>& loc,
                             const std::optional<int>& month) {
                             if (table.is_missing(i, vj)) return;
                             const double v = table.numeric_at(i, vj);
                             global_sum += v;
                             ++global_n;
                             if (loc && month) {
                                 auto& cell = acc[*loc][*month];
                                 cell.first += v;
                                 ++cell.second;
                             }
                         });
    if (global_n == 0) {
        throw DataError("cannot impute '" + value_col + "': no observed values in the fit rows");
    }
    imp.global_mean_ = global_sum / static_cast<double>(global_n);
    for (const auto& [loc, months] : acc) {
        for (const auto& [month, cell] : months) {
            imp.group_means_[loc][month] = cell.first / static_cast<double>(cell.second);
        }
    }
    return imp;
}

Table GroupMeanImputer::apply(const Table& table) const {
    const std::size_t vj = typed_col(table, value_col_, ColumnKind::numeric);
    const std::size_t lj = typed_col(table, location_col_, ColumnKind::categorical);
    const std::size_t dj = typed_col(table, date_col_, ColumnKind::date);

    std::vector<ColumnSchema> schema = table.schema();
    std::vector<ColumnData> columns;
    columns.reserve(table.n_cols());
    for (std::size_t j = 0; j < table.n_cols(); ++j) columns.push_back(table.column(j));

    ColumnData& col = columns[vj];
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        if (!col.missing[i]) continue;
        double fill = global_mean_;
        if (!table.is_missing(i, lj) && !table.is_missing(i, dj)) {
            const auto loc_it = group_means_.find(table.category_name(lj, table.cat_id_at(i, lj)));
            if (loc_it != group_means_.end()) {
                const auto m_it = loc_it->second.find(table.date_at(i, dj).month);
                if (m_it != loc_it->second.end()) fill = m_it->second;
            }
        }
        col.numeric[i] = fill;
        col.missing[i] = 0;
    }
    return Table(std::move(schema), std::move(columns), table.n_rows(),
                 table.dropped_unlabeled());
}

json GroupMeanImputer::to_json() const {
    json groups = json::object();
    for (const auto& [loc, months] : group_means_) {
        json per_month = json::object();
        for (const auto& [month, mean] : months) per_month[std::to_string(month)] = mean;
        groups[loc] = std::move(per_month);
    }
    return json{{"kind", "group_mean_imputer"},
                {"value_col", value_col_},
                {"location_col", location_col_},
                {"date_col", date_col_},
                {"group_means", std::move(groups)},
                {"global_mean", global_mean_}};
}

GroupMeanImputer GroupMeanImputer::from_json(const json& j) {
    GroupMeanImputer imp;
    imp.value_col_ = j.at("value_col").get<std::string>();
    imp.location_col_ = j.at("location_col").get<std::string>();
    imp.date_col_ = j.at("date_col").get<std::string>();
    imp.global_mean_ = j.at("global_mean").get<double>();
    for (const auto& [loc, months] : j.at("group_means").items()) {
        for (const auto& [month, mean] : months.items()) {
            imp.group_means_[loc][std::stoi(month)] = mean.get<double>();
        }
    }
    return imp;
}

GroupModeImputer GroupModeImputer::fit(const Table& table, const std::string& value_col,
                                       const std::string& location_col,
                                       const std::string& date_col,
                                       const std::vector<std::size_t>& rows) {
    const std::size_t vj = typed_col(table, value_col, ColumnKind::categorical);
    const std::size_t lj = typed_col(table, location_col, ColumnKind::categorical);
    const std::size_t dj = typed_col(table, date_col, ColumnKind::date);

    GroupModeImputer imp;
    imp.value_col_ = value_col;
    imp.location_col_ = location_col;
    imp.date_col_ = date_col;

    // count per group and globally; std::map keys keep tie-breaking
    // deterministic (smallest category name wins on equal counts)
    std::map<std::string, std::map<int, std::map<std::string, std::size_t>>> counts;
    std::map<std::string, std::size_t> global_counts;
    for_each_grouped_row(table, lj, dj, rows,
                         [&](std::size_t i, const std::optional<std::string>& loc,
                             const std::optional<int>& month) {
                             if (table.is_missing(i, vj)) return;
                             const std::string& v =
                                 table.category_name(vj, table.cat_id_at(i, vj));
                             ++global_counts[v];
                             if (loc && month) ++counts[*loc][*month][v];
                         });
    if (global_counts.empty()) {
        throw DataError("cannot impute '" + value_col + "': no observed values in the fit rows");
    }
    auto argmax = [](const std::map<std::string, std::size_t>& m) {
        auto best = m.begin();
        for (auto it = std::next(m.begin()); it != m.end(); ++it) {
            if (it->second > best->second) best = it; // ties keep the earlier (smaller) key
        }
        return best->first;
    };
    imp.global_mode_ = argmax(global_counts);
    for (const auto& [loc, months] : counts) {
        for (const auto& [month, tally] : months) {
            imp.group_modes_[loc][month] = argmax(tally);
        }
    }
    return imp;
}

Table GroupModeImputer::apply(const Table& table) const {
    const std::size_t vj = typed_col(table, value_col_, ColumnKind::categorical);
    const std::size_t lj = typed_col(table, location_col_, ColumnKind::categorical);
    const std::size_t dj = typed_col(table, date_col_, ColumnKind::date);

    std::vector<ColumnSchema> schema = table.schema();
    std::vector<ColumnData> columns;
    columns.reserve(table.n_cols());
    for (std::size_t j = 0; j < table.n_cols(); ++j) columns.push_back(table.column(j));

    ColumnData& col = columns[vj];
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        if (!col.missing[i]) continue;
        const std::string* fill = &global_mode_;
        if (!table.is_missing(i, lj) && !table.is_missing(i, dj)) {
            const auto loc_it = group_modes_.find(table.category_name(lj, table.cat_id_at(i, lj)));
            if (loc_it != group_modes_.end()) {
                const auto m_it = loc_it->second.find(table.date_at(i, dj).month);
                if (m_it != loc_it->second.end()) fill = &m_it->second;
            }
        }
        col.cat_ids[i] = col.intern(*fill);
        col.missing[i] = 0;
    }
    return Table(std::move(schema), std::move(columns), table.n_rows(),
                 table.dropped_unlabeled());
}

json GroupModeImputer::to_json() const {
    json groups = json::object();
    for (const auto& [loc, months] : group_modes_) {
        json per_month = json::object();
        for (const auto& [month, mode] : months) per_month[std::to_string(month)] = mode;
        groups[loc] = std::move(per_month);
    }
    return json{{"kind", "group_mode_imputer"},
                {"value_col", value_col_},
                {"location_col", location_col_},
                {"date_col", date_col_},
                {"group_modes", std::move(groups)},
                {"global_mode", global_mode_}};
}

GroupModeImputer GroupModeImputer::from_json(const json& j) {
    GroupModeImputer imp;
    imp.value_col_ = j.at("value_col").get<std::string>();
    imp.location_col_ = j.at("location_col").get<std::string>();
    imp.date_col_ = j.at("date_col").get<std::string>();
    imp.global_mode_ = j.at("global_mode").get<std::string>();
    for (const auto& [loc, months] : j.at("group_modes").items()) {
        for (const auto& [month, mode] : months.items()) {
            imp.group_modes_[loc][std::stoi(month)] = mode.get<std::string>();
        }
    }
    return imp;
}

// ---------------------------------------------------------------------------
// encoders
// ---------------------------------------------------------------------------

OneHotEncoder OneHotEncoder::fit(const Table& table, const std::string& col,
                                 const std::vector<std::size_t>& rows) {
    const std::size_t j = typed_col(table, col, ColumnKind::categorical);
    std::set<std::string> seen;
    for (std::size_t i : rows) {
        if (!table.is_missing(i, j)) seen.insert(table.category_name(j, table.cat_id_at(i, j)));
    }
    OneHotEncoder enc;
    enc.col_ = col;
    enc.vocabulary_.assign(seen.begin(), seen.end());
    enc.out_names_.reserve(enc.vocabulary_.size());
    for (const auto& v : enc.vocabulary_) enc.out_names_.push_back(col + "=" + v);
    return enc;
}

EncodedBlock OneHotEncoder::apply(const Table& table) const {
    const std::size_t j = typed_col(table, col_, ColumnKind::categorical);
    EncodedBlock out;
    out.matrix = FeatureMatrix(table.n_rows(), out_names_);
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        if (table.is_missing(i, j)) continue;
        const std::string& v = table.category_name(j, table.cat_id_at(i, j));
        const auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), v);
        if (it == vocabulary_.end() || *it != v) {
            ++out.unseen_categories;
            continue;
        }
        out.matrix(i, static_cast<std::size_t>(it - vocabulary_.begin())) = 1.0;
    }
    return out;
}

json OneHotEncoder::to_json() const {
    return json{{"kind", "onehot"}, {"col", col_}, {"vocabulary", vocabulary_}};
}

OneHotEncoder OneHotEncoder::from_json(const json& j) {
    OneHotEncoder enc;
    enc.col_ = j.at("col").get<std::string>();
    enc.vocabulary_ = j.at("vocabulary").get<std::vector<std::string>>();
    enc.out_names_.reserve(enc.vocabulary_.size());
    for (const auto& v : enc.vocabulary_) enc.out_names_.push_back(enc.col_ + "=" + v);
    return enc;
}

HashedEncoder HashedEncoder::fit(const Table& table, const std::string& col, std::size_t m,
                                 bool signed_hash) {
    typed_col(table, col, ColumnKind::categorical);
    if (m == 0) throw ConfigError("hash width must be at least 1");
    HashedEncoder enc;
    enc.col_ = col;
    enc.m_ = m;
    enc.signed_hash_ = signed_hash;
    enc.out_names_.reserve(m);
    for (std::size_t b = 0; b < m; ++b) enc.out_names_.push_back(col + "#" + std::to_string(b));
    return enc;
}

EncodedBlock HashedEncoder::apply(const Table& table) const {
    const std::size_t j = typed_col(table, col_, ColumnKind::categorical);
    EncodedBlock out;
    out.matrix = FeatureMatrix(table.n_rows(), out_names_);
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        if (table.is_missing(i, j)) continue;
        const std::uint64_t h = fnv1a64(table.category_name(j, table.cat_id_at(i, j)));
        const std::size_t idx = static_cast<std::size_t>(h % m_);
        const double sign = (signed_hash_ && ((h >> 32) & 1ULL)) ? -1.0 : 1.0;
        out.matrix(i, idx) = sign;
    }
    return out;
}

json HashedEncoder::to_json() const {
    return json{{"kind", "hasher"}, {"col", col_}, {"m", m_}, {"signed", signed_hash_}};
}

HashedEncoder HashedEncoder::from_json(const json& j) {
    HashedEncoder enc;
    enc.col_ = j.at("col").get<std::string>();
    enc.m_ = j.at("m").get<std::size_t>();
    enc.signed_hash_ = j.at("signed").get<bool>();
    enc.out_names_.reserve(enc.m_);
    for (std::size_t b = 0; b < enc.m_; ++b) {
        enc.out_names_.push_back(enc.col_ + "#" + std::to_string(b));
    }
    return enc;
}

// ---------------------------------------------------------------------------
// scaling
// ---------------------------------------------------------------------------

MinMaxScaler MinMaxScaler::fit(const FeatureMatrix& m) {
    MinMaxScaler s;
    s.col_names_ = m.col_names();
    s.params_.min.assign(m.n_cols(), 0.0);
    s.params_.max.assign(m.n_cols(), 0.0);
    for (std::size_t j = 0; j < m.n_cols(); ++j) {
        double lo = m.n_rows() ? m(0, j) : 0.0;
        double hi = lo;
        for (std::size_t i = 1; i < m.n_rows(); ++i) {
            lo = std::min(lo, m(i, j));
            hi = std::max(hi, m(i, j));
        }
        s.params_.min[j] = lo;
        s.params_.max[j] = hi;
    }
    return s;
}

FeatureMatrix MinMaxScaler::apply(const FeatureMatrix& m) const {
    if (m.n_cols() != params_.min.size()) {
        throw DataError("scaler fitted on " + std::to_string(params_.min.size()) +
                        " columns, applied to " + std::to_string(m.n_cols()));
    }
    FeatureMatrix out(m.n_rows(), m.col_names());
    for (std::size_t j = 0; j < m.n_cols(); ++j) {
        const double lo = params_.min[j];
        const double range = params_.max[j] - lo;
        for (std::size_t i = 0; i < m.n_rows(); ++i) {
            double v = range > 0.0 ? (m(i, j) - lo) / range : 0.0;
            out(i, j) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

json MinMaxScaler::to_json() const {
    return json{{"kind", "minmax"},
                {"col_names", col_names_},
                {"min", params_.min},
                {"max", params_.max}};
}

MinMaxScaler MinMaxScaler::from_json(const json& j) {
    MinMaxScaler s;
    s.col_names_ = j.at("col_names").get<std::vector<std::string>>();
    s.params_.min = j.at("min").get<std::vector<double>>();
    s.params_.max = j.at("max").get<std::vector<double>>();
    return s;
}

std::pair<MinMaxScaler, FeatureMatrix> minmax_scale(const FeatureMatrix& m) {
    MinMaxScaler s = MinMaxScaler::fit(m);
    FeatureMatrix scaled = s.apply(m);
    return {std::move(s), std::move(scaled)};
}

// ---------------------------------------------------------------------------
// feature selection and correlation
// ---------------------------------------------------------------------------

std::vector<double> chi2_scores(const FeatureMatrix& m, const LabelVector& labels) {
    if (labels.size() != m.n_rows()) {
        throw DataError("labels length " + std::to_string(labels.size()) +
                        " does not match matrix rows " + std::to_string(m.n_rows()));
    }
    const std::size_t n = m.n_rows();
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n; ++i) n_pos += labels[i];
    const double p1 = n ? static_cast<double>(n_pos) / static_cast<double>(n) : 0.0;
    const double p0 = 1.0 - p1;

    std::vector<double> scores(m.n_cols(), 0.0);
    for (std::size_t j = 0; j < m.n_cols(); ++j) {
        double obs1 = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = m(i, j);
            if (v < 0.0) {
                throw DataError("chi2 requires non-negative entries; column '" +
                                m.col_names()[j] + "' has " + std::to_string(v));
            }
            total += v;
            if (labels[i]) obs1 += v;
        }
        if (total == 0.0) continue; // zero-sum column scores 0 by convention
        const double obs0 = total - obs1;
        const double exp0 = p0 * total;
        const double exp1 = p1 * total;
        double score = 0.0;
        if (exp0 > 0.0) score += (obs0 - exp0) * (obs0 - exp0) / exp0;
        if (exp1 > 0.0) score += (obs1 - exp1) * (obs1 - exp1) / exp1;
        scores[j] = score;
    }
    return scores;
}

SelectKBest SelectKBest::fit(const FeatureMatrix& m, const LabelVector& labels, std::size_t k) {
    if (k < 1 || k > m.n_cols()) {
        throw ConfigError("selector k = " + std::to_string(k) + " out of range [1, " +
                          std::to_string(m.n_cols()) + "]");
    }
    SelectKBest s;
    s.fit_scores_ = chi2_scores(m, labels);
    std::vector<std::size_t> order(m.n_cols());
    std::iota(order.begin(), order.end(), 0);
    // highest score first; equal scores keep the lower column index
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return s.fit_scores_[a] > s.fit_scores_[b];
    });
    s.kept_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(s.kept_.begin(), s.kept_.end()); // original column order
    s.kept_names_.reserve(k);
    for (std::size_t j : s.kept_) s.kept_names_.push_back(m.col_names()[j]);
    return s;
}

FeatureMatrix SelectKBest::apply(const FeatureMatrix& m) const {
    if (!kept_.empty() && kept_.back() >= m.n_cols()) {
        throw DataError("selector refers to column " + std::to_string(kept_.back()) +
                        " but the matrix has " + std::to_string(m.n_cols()));
    }
    FeatureMatrix out(m.n_rows(), kept_names_);
    for (std::size_t i = 0; i < m.n_rows(); ++i) {
        for (std::size_t r = 0; r < kept_.size(); ++r) out(i, r) = m(i, kept_[r]);
    }
    return out;
}

json SelectKBest::to_json() const {
    return json{{"kind", "selector"},
                {"kept_indices", kept_},
                {"kept_names", kept_names_},
                {"fit_scores", fit_scores_}};
}

SelectKBest SelectKBest::from_json(const json& j) {
    SelectKBest s;
    s.kept_ = j.at("kept_indices").get<std::vector<std::size_t>>();
    s.kept_names_ = j.at("kept_names").get<std::vector<std::string>>();
    s.fit_scores_ = j.at("fit_scores").get<std::vector<double>>();
    return s;
}

PearsonResult pearson_correlation(const FeatureMatrix& m, const LabelVector& labels) {
    if (m.n_rows() < 2) throw DataError("correlation needs at least 2 rows");
    if (labels.size() != m.n_rows()) {
        throw DataError("labels length " + std::to_string(labels.size()) +
                        " does not match matrix rows " + std::to_string(m.n_rows()));
    }
    const std::size_t n = m.n_rows();
    const std::size_t d = m.n_cols();
    const double nd = static_cast<double>(n);

    // center every column (and the target) once, then correlate
    std::vector<std::vector<double>> centered(d + 1, std::vector<double>(n));
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += m(i, j);
        mean /= nd;
        for (std::size_t i = 0; i < n; ++i) centered[j][i] = m(i, j) - mean;
    }
    {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += labels[i];
        mean /= nd;
        for (std::size_t i = 0; i < n; ++i) centered[d][i] = labels[i] - mean;
    }
    std::vector<double> norms(d + 1, 0.0);
    for (std::size_t j = 0; j <= d; ++j) {
        double ss = 0.0;
        for (double v : centered[j]) ss += v * v;
        norms[j] = std::sqrt(ss);
    }

    PearsonResult out;
    out.constant_column.assign(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
        if (norms[j] == 0.0) out.constant_column[j] = 1;
    }
    auto corr = [&](std::size_t a, std::size_t b) -> double {
        if (norms[a] == 0.0 || norms[b] == 0.0) return 0.0;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += centered[a][i] * centered[b][i];
        return dot / (norms[a] * norms[b]);
    };
    out.target_r.resize(d);
    for (std::size_t j = 0; j < d; ++j) out.target_r[j] = corr(j, d);
    out.matrix.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t a = 0; a < d; ++a) {
        out.matrix[a][a] = out.constant_column[a] ? 0.0 : 1.0;
        for (std::size_t b = a + 1; b < d; ++b) {
            const double r = corr(a, b);
            out.matrix[a][b] = r;
            out.matrix[b][a] = r;
        }
    }
    return out;
}

} // namespace rainpipe
