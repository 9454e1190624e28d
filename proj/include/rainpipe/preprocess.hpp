#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rainpipe/dataset.hpp"
#include "rainpipe/matrix.hpp"

namespace rainpipe {

// Replaces the date column with numeric Year, Month, Day columns in place.
// A missing date propagates missing to all three.
Table expand_date(const Table& table);

// Removes the named columns; unknown names are an error.
Table drop_columns(const Table& table, const std::vector<std::string>& names);

// 64-bit FNV-1a over the UTF-8 bytes of s.
std::uint64_t fnv1a64(const std::string& s);

// Group-mean imputer for one numeric column. The group key is
// (location category, calendar month taken from the date column); rows
// whose key cells are missing, and groups never seen at fit time, fall
// back to the global column mean. Fitting uses only the given rows.
class GroupMeanImputer {
public:
    static GroupMeanImputer fit(const Table& table, const std::string& value_col,
                                const std::string& location_col, const std::string& date_col,
                                const std::vector<std::size_t>& rows);

    // New table with this column's missing cells filled. Non-missing cells
    // are untouched.
    Table apply(const Table& table) const;

    const std::string& value_col() const { return value_col_; }
    double global_mean() const { return global_mean_; }

    nlohmann::json to_json() const;
    static GroupMeanImputer from_json(const nlohmann::json& j);

private:
    std::string value_col_;
    std::string location_col_;
    std::string date_col_;
    std::map<std::string, std::map<int, double>> group_means_; // location -> month -> mean
    double global_mean_ = 0.0;

    friend class GroupModeImputer;
};

// Group-mode imputer for one categorical column; same grouping and
// fallback scheme as the mean imputer, with lexicographically smaller
// category winning count ties.
class GroupModeImputer {
public:
    static GroupModeImputer fit(const Table& table, const std::string& value_col,
                                const std::string& location_col, const std::string& date_col,
                                const std::vector<std::size_t>& rows);

    Table apply(const Table& table) const;

    const std::string& value_col() const { return value_col_; }
    const std::string& global_mode() const { return global_mode_; }

    nlohmann::json to_json() const;
    static GroupModeImputer from_json(const nlohmann::json& j);

private:
    std::string value_col_;
    std::string location_col_;
    std::string date_col_;
    std::map<std::string, std::map<int, std::string>> group_modes_;
    std::string global_mode_;
};

struct EncodedBlock {
    FeatureMatrix matrix;
    std::size_t unseen_categories = 0; // rows whose category was not in the fit vocabulary
};

// One column -> one 0/1 indicator column per fit-time category (sorted
// vocabulary). Unseen and missing values yield all-zero rows.
class OneHotEncoder {
public:
    static OneHotEncoder fit(const Table& table, const std::string& col,
                             const std::vector<std::size_t>& rows);

    EncodedBlock apply(const Table& table) const;

    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    const std::vector<std::string>& out_names() const { return out_names_; }
    const std::string& col() const { return col_; }

    nlohmann::json to_json() const;
    static OneHotEncoder from_json(const nlohmann::json& j);

private:
    std::string col_;
    std::vector<std::string> vocabulary_; // sorted
    std::vector<std::string> out_names_;
};

// One column -> m columns via the hashing trick: category s lands at
// index fnv1a64(s) mod m, with sign -1 when bit 32 of the hash is set
// (sign hashing keeps collisions unbiased; switchable off). Missing
// cells yield the zero vector. Stateless apart from its configuration,
// so identical across runs and platforms.
class HashedEncoder {
public:
    HashedEncoder() = default;
    static HashedEncoder fit(const Table& table, const std::string& col, std::size_t m,
                             bool signed_hash = true);

    EncodedBlock apply(const Table& table) const;

    std::size_t width() const { return m_; }
    bool signed_hash() const { return signed_hash_; }
    const std::vector<std::string>& out_names() const { return out_names_; }
    const std::string& col() const { return col_; }

    nlohmann::json to_json() const;
    static HashedEncoder from_json(const nlohmann::json& j);

private:
    std::string col_;
    std::size_t m_ = 0;
    bool signed_hash_ = true;
    std::vector<std::string> out_names_;
};

struct ScalerParams {
    std::vector<double> min;
    std::vector<double> max;
};

// Per-column min-max scaler to [0, 1]. Constant columns map to 0;
// apply-time values outside the fit range are clipped.
class MinMaxScaler {
public:
    static MinMaxScaler fit(const FeatureMatrix& m);

    FeatureMatrix apply(const FeatureMatrix& m) const;

    const ScalerParams& params() const { return params_; }

    nlohmann::json to_json() const;
    static MinMaxScaler from_json(const nlohmann::json& j);

private:
    ScalerParams params_;
    std::vector<std::string> col_names_;
};

// fit + apply in one call, for callers that scale their own fit data.
std::pair<MinMaxScaler, FeatureMatrix> minmax_scale(const FeatureMatrix& m);

// Chi-squared score per column against a binary target; requires
// non-negative entries. Columns summing to zero score 0.
std::vector<double> chi2_scores(const FeatureMatrix& m, const LabelVector& labels);

// Keeps the k columns with the highest chi2 score, ties broken by lower
// column index; kept columns stay in their original order.
class SelectKBest {
public:
    static SelectKBest fit(const FeatureMatrix& m, const LabelVector& labels, std::size_t k);

    FeatureMatrix apply(const FeatureMatrix& m) const;

    const std::vector<std::size_t>& kept_indices() const { return kept_; }
    const std::vector<std::string>& kept_names() const { return kept_names_; }
    const std::vector<double>& fit_scores() const { return fit_scores_; }

    nlohmann::json to_json() const;
    static SelectKBest from_json(const nlohmann::json& j);

private:
    std::vector<std::size_t> kept_; // ascending
    std::vector<std::string> kept_names_;
    std::vector<double> fit_scores_;
};

struct PearsonResult {
    std::vector<double> target_r;              // per column vs the 0/1 target
    std::vector<std::vector<double>> matrix;   // pairwise, matrix[i][j] == matrix[j][i]
    std::vector<std::uint8_t> constant_column; // r defined as 0 for these
};

// Standard Pearson correlation; constant columns yield r = 0 and are flagged.
PearsonResult pearson_correlation(const FeatureMatrix& m, const LabelVector& labels);

} // namespace rainpipe
