#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "rainpipe/matrix.hpp"

namespace rainpipe {

enum class ColumnKind { numeric, categorical, date, binary_label };

const char* to_string(ColumnKind kind);

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    bool nullable = true;
};

// Calendar date, Gregorian-validated at parse time.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;
    bool operator==(const Date&) const = default;
};

bool is_valid_gregorian(const Date& d);

// Storage for one column. Which vectors are populated depends on the
// schema kind: numeric/binary_label use `numeric`, date uses `dates`,
// categorical uses `cat_ids` plus the `categories` vocabulary. `missing`
// always has one entry per row; storage under a missing cell is never read.
struct ColumnData {
    std::vector<double> numeric;
    std::vector<Date> dates;
    std::vector<std::int32_t> cat_ids;
    std::vector<std::string> categories;
    std::vector<std::uint8_t> missing;

    std::int32_t intern(const std::string& value);
};

// Immutable column-typed table with a per-cell missing mask.
class Table {
public:
    Table() = default;
    Table(std::vector<ColumnSchema> schema, std::vector<ColumnData> columns,
          std::size_t n_rows, std::size_t dropped_unlabeled = 0);

    const std::vector<ColumnSchema>& schema() const { return schema_; }
    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return schema_.size(); }
    std::size_t dropped_unlabeled() const { return dropped_unlabeled_; }

    bool has_column(const std::string& name) const;
    std::size_t col_index(const std::string& name) const; // throws DataError if unknown
    const ColumnData& column(std::size_t j) const { return columns_[j]; }
    const ColumnSchema& col_schema(std::size_t j) const { return schema_[j]; }

    bool is_missing(std::size_t i, std::size_t j) const { return columns_[j].missing[i] != 0; }
    double numeric_at(std::size_t i, std::size_t j) const { return columns_[j].numeric[i]; }
    Date date_at(std::size_t i, std::size_t j) const { return columns_[j].dates[i]; }
    std::int32_t cat_id_at(std::size_t i, std::size_t j) const { return columns_[j].cat_ids[i]; }
    const std::string& category_name(std::size_t j, std::int32_t id) const {
        return columns_[j].categories[static_cast<std::size_t>(id)];
    }

    // Index of the single binary_label column; throws if absent.
    std::size_t label_col() const;
    LabelVector labels() const;

private:
    std::vector<ColumnSchema> schema_;
    std::vector<ColumnData> columns_;
    std::size_t n_rows_ = 0;
    std::size_t dropped_unlabeled_ = 0;
};

struct ClassCounts {
    std::size_t n_negative = 0;
    std::size_t n_positive = 0;
};

struct SplitPair {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    double ratio = 0.0;
};

// The 24-column weather observation schema, in file order.
std::vector<ColumnSchema> weather_schema();

// Loads a comma-delimited, header-first CSV against the given schema.
// "NA" and the empty string are the only missing markers; rows with a
// missing binary_label cell are dropped and counted on the table.
Table load_csv(const std::filesystem::path& path, const std::vector<ColumnSchema>& schema);

// Re-serializes a table; numerics keep 10 significant digits, missing
// cells are written as NA.
void write_csv(const Table& table, const std::filesystem::path& path);

ClassCounts class_counts(const LabelVector& labels);

// Stratified shuffle split. Per-class train counts are rounded to
// ratio * class size, so class proportions in the train set stay within
// one sample of the overall proportions. Deterministic for a fixed seed.
SplitPair split_holdout(std::size_t n_rows, const LabelVector& labels, double ratio,
                        std::uint64_t seed);

} // namespace rainpipe
