#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rainpipe/preprocess.hpp"

namespace rainpipe {

// The full fitted preprocessing chain: drop leaky columns, impute, expand
// the date, encode categoricals, scale, select. Fit once on training rows,
// then applied unchanged anywhere (the JSON sidecar makes a trained
// pipeline reusable without refitting).
class PipelineModel {
public:
    struct FitConfig {
        std::vector<std::string> drop; // always contains RISK_MM in the standard runner
        std::size_t hash_width = 8;
        bool hash_signed = true;
        std::size_t selector_k = 4;
        // Columns encoded with the hasher; other categoricals are one-hot.
        std::vector<std::string> hashed_columns = {"WindGustDir", "WindDir9am", "WindDir3pm"};
        std::string location_col = "Location";
        std::string date_col = "Date";
    };

    static PipelineModel fit(const Table& raw, const std::vector<std::size_t>& fit_rows,
                             const FitConfig& config);

    // Applies the fitted chain to a raw table (same schema as at fit time).
    FeatureMatrix apply(const Table& raw) const;

    const std::vector<std::string>& selected_features() const;
    const std::vector<double>& selector_scores() const;
    // Column names of the design matrix before selection.
    const std::vector<std::string>& pre_selection_columns() const { return pre_selection_cols_; }
    std::size_t unseen_category_rows() const { return unseen_total_; }

    nlohmann::json to_json() const;
    static PipelineModel from_json(const nlohmann::json& j);

private:
    FitConfig config_;
    std::vector<GroupMeanImputer> mean_imputers_;
    std::vector<GroupModeImputer> mode_imputers_;
    // Plain global fills, used where group imputation cannot run: when the
    // location/date key columns are absent, and for the Year/Month/Day
    // columns that expansion derives from missing dates.
    std::vector<std::pair<std::string, double>> fallback_means_;
    std::vector<std::pair<std::string, std::string>> fallback_modes_;
    std::vector<OneHotEncoder> onehots_;
    std::vector<HashedEncoder> hashers_;
    MinMaxScaler scaler_;
    SelectKBest selector_;
    std::vector<std::string> pre_selection_cols_;
    mutable std::size_t unseen_total_ = 0;

    FeatureMatrix assemble(const Table& prepared) const;
    Table prepare(const Table& raw) const;
    Table prepare_columns(const Table& base) const;
    Table apply_fallbacks(const Table& t) const;
};

} // namespace rainpipe
