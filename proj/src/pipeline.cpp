#include "rainpipe/pipeline.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "rainpipe/errors.hpp"

namespace rainpipe {

using nlohmann::json;

namespace {

bool contains(const std::vector<std::string>& names, const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

// Fills this column's still-missing cells with one global value.
void fill_numeric(ColumnData& col, double value) {
    for (std::size_t i = 0; i < col.missing.size(); ++i) {
        if (!col.missing[i]) continue;
        col.numeric[i] = value;
        col.missing[i] = 0;
    }
}

void fill_categorical(ColumnData& col, const std::string& value) {
    const std::int32_t id = col.intern(value);
    for (std::size_t i = 0; i < col.missing.size(); ++i) {
        if (!col.missing[i]) continue;
        col.cat_ids[i] = id;
        col.missing[i] = 0;
    }
}

// Mean over the non-missing cells of `rows`; errors if there are none,
// because every later stage needs a real value for this column.
double global_mean_of(const Table& t, std::size_t j, const std::vector<std::size_t>& rows) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i : rows) {
        if (t.is_missing(i, j)) continue;
        sum += t.numeric_at(i, j);
        ++n;
    }
    if (n == 0) {
        throw DataError("column '" + t.col_schema(j).name + "' has no observed values to impute from");
    }
    return sum / static_cast<double>(n);
}

// Most frequent category over the non-missing cells of `rows`;
// lexicographically smaller name wins count ties.
std::string global_mode_of(const Table& t, std::size_t j, const std::vector<std::size_t>& rows) {
    std::map<std::string, std::size_t> counts;
    for (std::size_t i : rows) {
        if (t.is_missing(i, j)) continue;
        ++counts[t.category_name(j, t.cat_id_at(i, j))];
    }
    if (counts.empty()) {
        throw DataError("column '" + t.col_schema(j).name + "' has no observed values to impute from");
    }
    const auto best = std::max_element(counts.begin(), counts.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    return best->first;
}

} // namespace

PipelineModel PipelineModel::fit(const Table& raw, const std::vector<std::size_t>& fit_rows,
                                 const FitConfig& config) {
    if (fit_rows.empty()) throw DataError("pipeline fit: no rows to fit on");

    PipelineModel model;
    model.config_ = config;

    const Table base = config.drop.empty() ? raw : drop_columns(raw, config.drop);

    // Group imputation needs both key columns; without them every fill
    // falls back to the plain global statistic.
    const bool grouped = !config.location_col.empty() && base.has_column(config.location_col) &&
                         !config.date_col.empty() && base.has_column(config.date_col);

    for (std::size_t j = 0; j < base.n_cols(); ++j) {
        const ColumnSchema& cs = base.col_schema(j);
        if (cs.kind == ColumnKind::numeric) {
            if (grouped) {
                model.mean_imputers_.push_back(GroupMeanImputer::fit(
                    base, cs.name, config.location_col, config.date_col, fit_rows));
            } else {
                model.fallback_means_.emplace_back(cs.name, global_mean_of(base, j, fit_rows));
            }
        } else if (cs.kind == ColumnKind::categorical) {
            if (grouped) {
                model.mode_imputers_.push_back(GroupModeImputer::fit(
                    base, cs.name, config.location_col, config.date_col, fit_rows));
            } else {
                model.fallback_modes_.emplace_back(cs.name, global_mode_of(base, j, fit_rows));
            }
        }
    }

    // A missing date survives group imputation (only value columns are
    // imputed) and expansion turns it into missing Year/Month/Day cells,
    // so those three columns get global fills of their own.
    Table staged = model.prepare_columns(base);
    if (!config.date_col.empty() && base.has_column(config.date_col)) {
        staged = expand_date(staged);
        for (const char* name : {"Year", "Month", "Day"}) {
            const std::size_t j = staged.col_index(name);
            model.fallback_means_.emplace_back(name, global_mean_of(staged, j, fit_rows));
        }
        staged = model.apply_fallbacks(staged);
    }

    for (std::size_t j = 0; j < staged.n_cols(); ++j) {
        const ColumnSchema& cs = staged.col_schema(j);
        if (cs.kind != ColumnKind::categorical) continue;
        if (config.hash_width > 0 && contains(config.hashed_columns, cs.name)) {
            model.hashers_.push_back(
                HashedEncoder::fit(staged, cs.name, config.hash_width, config.hash_signed));
        } else {
            model.onehots_.push_back(OneHotEncoder::fit(staged, cs.name, fit_rows));
        }
    }

    const FeatureMatrix pre = model.assemble(staged);
    model.pre_selection_cols_ = pre.col_names();
    model.unseen_total_ = 0; // fit-time assembly only sees fit-time categories

    const FeatureMatrix pre_fit = pre.take_rows(fit_rows);
    model.scaler_ = MinMaxScaler::fit(pre_fit);
    const FeatureMatrix scaled_fit = model.scaler_.apply(pre_fit);
    model.selector_ =
        SelectKBest::fit(scaled_fit, staged.labels().take_rows(fit_rows), config.selector_k);
    return model;
}

// Imputation up to (but not including) date expansion.
Table PipelineModel::prepare_columns(const Table& base) const {
    Table t = base;
    for (const auto& imp : mean_imputers_) t = imp.apply(t);
    for (const auto& imp : mode_imputers_) t = imp.apply(t);
    return apply_fallbacks(t);
}

Table PipelineModel::apply_fallbacks(const Table& t) const {
    bool needed = false;
    for (const auto& [name, value] : fallback_means_) {
        (void)value;
        if (t.has_column(name)) needed = true;
    }
    for (const auto& [name, value] : fallback_modes_) {
        (void)value;
        if (t.has_column(name)) needed = true;
    }
    if (!needed) return t;

    std::vector<ColumnSchema> schema = t.schema();
    std::vector<ColumnData> columns;
    columns.reserve(t.n_cols());
    for (std::size_t j = 0; j < t.n_cols(); ++j) columns.push_back(t.column(j));

    for (const auto& [name, value] : fallback_means_) {
        if (!t.has_column(name)) continue;
        fill_numeric(columns[t.col_index(name)], value);
    }
    for (const auto& [name, value] : fallback_modes_) {
        if (!t.has_column(name)) continue;
        fill_categorical(columns[t.col_index(name)], value);
    }
    return Table(std::move(schema), std::move(columns), t.n_rows(), t.dropped_unlabeled());
}

Table PipelineModel::prepare(const Table& raw) const {
    Table t = config_.drop.empty() ? raw : drop_columns(raw, config_.drop);
    t = prepare_columns(t);
    if (!config_.date_col.empty() && t.has_column(config_.date_col)) {
        t = expand_date(t);
        t = apply_fallbacks(t);
    }
    return t;
}

FeatureMatrix PipelineModel::assemble(const Table& prepared) const {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < prepared.n_cols(); ++j) {
        const ColumnSchema& cs = prepared.col_schema(j);
        if (cs.kind == ColumnKind::numeric) {
            names.push_back(cs.name);
        } else if (cs.kind == ColumnKind::categorical) {
            bool found = false;
            for (const auto& enc : hashers_) {
                if (enc.col() != cs.name) continue;
                names.insert(names.end(), enc.out_names().begin(), enc.out_names().end());
                found = true;
            }
            for (const auto& enc : onehots_) {
                if (enc.col() != cs.name) continue;
                names.insert(names.end(), enc.out_names().begin(), enc.out_names().end());
                found = true;
            }
            if (!found) {
                throw DataError("no fitted encoder for column '" + cs.name + "'");
            }
        }
        // binary_label and date columns are not features
    }

    FeatureMatrix out(prepared.n_rows(), names);
    std::size_t at = 0;
    for (std::size_t j = 0; j < prepared.n_cols(); ++j) {
        const ColumnSchema& cs = prepared.col_schema(j);
        if (cs.kind == ColumnKind::numeric) {
            for (std::size_t i = 0; i < prepared.n_rows(); ++i) {
                if (prepared.is_missing(i, j)) {
                    throw DataError("column '" + cs.name + "' still has missing cells after imputation");
                }
                out(i, at) = prepared.numeric_at(i, j);
            }
            ++at;
        } else if (cs.kind == ColumnKind::categorical) {
            const EncodedBlock* block = nullptr;
            EncodedBlock hashed, onehot;
            for (const auto& enc : hashers_) {
                if (enc.col() != cs.name) continue;
                hashed = enc.apply(prepared);
                block = &hashed;
            }
            for (const auto& enc : onehots_) {
                if (enc.col() != cs.name) continue;
                onehot = enc.apply(prepared);
                unseen_total_ += onehot.unseen_categories;
                block = &onehot;
            }
            for (std::size_t b = 0; b < block->matrix.n_cols(); ++b) {
                for (std::size_t i = 0; i < prepared.n_rows(); ++i) {
                    out(i, at + b) = block->matrix(i, b);
                }
            }
            at += block->matrix.n_cols();
        }
    }
    return out;
}

FeatureMatrix PipelineModel::apply(const Table& raw) const {
    const Table prepared = prepare(raw);
    const FeatureMatrix pre = assemble(prepared);
    if (pre.col_names() != pre_selection_cols_) {
        throw DataError("pipeline applied to a table with a different column layout than at fit time");
    }
    return selector_.apply(scaler_.apply(pre));
}

const std::vector<std::string>& PipelineModel::selected_features() const {
    return selector_.kept_names();
}

const std::vector<double>& PipelineModel::selector_scores() const {
    return selector_.fit_scores();
}

json PipelineModel::to_json() const {
    json mean_imps = json::array();
    for (const auto& imp : mean_imputers_) mean_imps.push_back(imp.to_json());
    json mode_imps = json::array();
    for (const auto& imp : mode_imputers_) mode_imps.push_back(imp.to_json());
    json fb_means = json::array();
    for (const auto& [name, value] : fallback_means_) {
        fb_means.push_back(json{{"column", name}, {"mean", value}});
    }
    json fb_modes = json::array();
    for (const auto& [name, value] : fallback_modes_) {
        fb_modes.push_back(json{{"column", name}, {"mode", value}});
    }
    json onehots = json::array();
    for (const auto& enc : onehots_) onehots.push_back(enc.to_json());
    json hashers = json::array();
    for (const auto& enc : hashers_) hashers.push_back(enc.to_json());
    return json{{"kind", "pipeline"},
                {"config",
                 {{"drop", config_.drop},
                  {"hash_width", config_.hash_width},
                  {"hash_signed", config_.hash_signed},
                  {"selector_k", config_.selector_k},
                  {"hashed_columns", config_.hashed_columns},
                  {"location_col", config_.location_col},
                  {"date_col", config_.date_col}}},
                {"mean_imputers", std::move(mean_imps)},
                {"mode_imputers", std::move(mode_imps)},
                {"fallback_means", std::move(fb_means)},
                {"fallback_modes", std::move(fb_modes)},
                {"onehots", std::move(onehots)},
                {"hashers", std::move(hashers)},
                {"scaler", scaler_.to_json()},
                {"selector", selector_.to_json()},
                {"pre_selection_columns", pre_selection_cols_}};
}

PipelineModel PipelineModel::from_json(const json& j) {
    if (j.value("kind", "") != "pipeline") {
        throw ConfigError("expected a serialized pipeline, got kind '" + j.value("kind", "") + "'");
    }
    PipelineModel model;
    const json& c = j.at("config");
    model.config_.drop = c.at("drop").get<std::vector<std::string>>();
    model.config_.hash_width = c.at("hash_width").get<std::size_t>();
    model.config_.hash_signed = c.at("hash_signed").get<bool>();
    model.config_.selector_k = c.at("selector_k").get<std::size_t>();
    model.config_.hashed_columns = c.at("hashed_columns").get<std::vector<std::string>>();
    model.config_.location_col = c.at("location_col").get<std::string>();
    model.config_.date_col = c.at("date_col").get<std::string>();
    for (const auto& item : j.at("mean_imputers")) {
        model.mean_imputers_.push_back(GroupMeanImputer::from_json(item));
    }
    for (const auto& item : j.at("mode_imputers")) {
        model.mode_imputers_.push_back(GroupModeImputer::from_json(item));
    }
    for (const auto& item : j.at("fallback_means")) {
        model.fallback_means_.emplace_back(item.at("column").get<std::string>(),
                                           item.at("mean").get<double>());
    }
    for (const auto& item : j.at("fallback_modes")) {
        model.fallback_modes_.emplace_back(item.at("column").get<std::string>(),
                                           item.at("mode").get<std::string>());
    }
    for (const auto& item : j.at("onehots")) {
        model.onehots_.push_back(OneHotEncoder::from_json(item));
    }
    for (const auto& item : j.at("hashers")) {
        model.hashers_.push_back(HashedEncoder::from_json(item));
    }
    model.scaler_ = MinMaxScaler::from_json(j.at("scaler"));
    model.selector_ = SelectKBest::from_json(j.at("selector"));
    model.pre_selection_cols_ = j.at("pre_selection_columns").get<std::vector<std::string>>();
    return model;
}

} // namespace rainpipe
