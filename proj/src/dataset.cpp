#include "rainpipe/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "rainpipe/errors.hpp"
#include "rainpipe/rng.hpp"

namespace rainpipe {

const char* to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::numeric: return "numeric";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::date: return "date";
        case ColumnKind::binary_label: return "binary_label";
    }
    return "?";
}

bool is_valid_gregorian(const Date& d) {
    if (d.month < 1 || d.month > 12) return false;
    static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dim = days[d.month - 1];
    const bool leap = (d.year % 4 == 0 && (d.year % 100 != 0 || d.year % 400 == 0));
    if (d.month == 2 && leap) dim = 29;
    return d.day >= 1 && d.day <= dim;
}

std::int32_t ColumnData::intern(const std::string& value) {
    for (std::size_t i = 0; i < categories.size(); ++i) {
        if (categories[i] == value) return static_cast<std::int32_t>(i);
    }
    categories.push_back(value);
    return static_cast<std::int32_t>(categories.size() - 1);
}

Table::Table(std::vector<ColumnSchema> schema, std::vector<ColumnData> columns,
             std::size_t n_rows, std::size_t dropped_unlabeled)
    : schema_(std::move(schema)),
      columns_(std::move(columns)),
      n_rows_(n_rows),
      dropped_unlabeled_(dropped_unlabeled) {
    if (schema_.size() != columns_.size()) {
        throw DataError("table: schema and column storage size mismatch");
    }
    std::size_t labels = 0;
    for (std::size_t j = 0; j < schema_.size(); ++j) {
        for (std::size_t k = j + 1; k < schema_.size(); ++k) {
            if (schema_[j].name == schema_[k].name) {
                throw DataError("table: duplicate column name '" + schema_[j].name + "'");
            }
        }
        if (schema_[j].kind == ColumnKind::binary_label) ++labels;
        if (columns_[j].missing.size() != n_rows_) {
            throw DataError("table: column '" + schema_[j].name + "' has wrong row count");
        }
    }
    if (labels > 1) throw DataError("table: more than one binary_label column");
}

bool Table::has_column(const std::string& name) const {
    for (const auto& c : schema_) {
        if (c.name == name) return true;
    }
    return false;
}

std::size_t Table::col_index(const std::string& name) const {
    for (std::size_t j = 0; j < schema_.size(); ++j) {
        if (schema_[j].name == name) return j;
    }
    throw DataError("table: unknown column '" + name + "'");
}

std::size_t Table::label_col() const {
    for (std::size_t j = 0; j < schema_.size(); ++j) {
        if (schema_[j].kind == ColumnKind::binary_label) return j;
    }
    throw DataError("table: no binary_label column");
}

LabelVector Table::labels() const {
    const std::size_t j = label_col();
    LabelVector out;
    out.positive_meaning = schema_[j].name + " = Yes";
    out.values.reserve(n_rows_);
    for (std::size_t i = 0; i < n_rows_; ++i) {
        out.values.push_back(static_cast<std::uint8_t>(columns_[j].numeric[i] != 0.0));
    }
    return out;
}

std::vector<ColumnSchema> weather_schema() {
    using K = ColumnKind;
    return {
        {"Date", K::date, false},
        {"Location", K::categorical, false},
        {"MinTemp", K::numeric, true},
        {"MaxTemp", K::numeric, true},
        {"Rainfall", K::numeric, true},
        {"Evaporation", K::numeric, true},
        {"Sunshine", K::numeric, true},
        {"WindGustDir", K::categorical, true},
        {"WindGustSpeed", K::numeric, true},
        {"WindDir9am", K::categorical, true},
        {"WindDir3pm", K::categorical, true},
        {"WindSpeed9am", K::numeric, true},
        {"WindSpeed3pm", K::numeric, true},
        {"Humidity9am", K::numeric, true},
        {"Humidity3pm", K::numeric, true},
        {"Pressure9am", K::numeric, true},
        {"Pressure3pm", K::numeric, true},
        {"Cloud9am", K::numeric, true},
        {"Cloud3pm", K::numeric, true},
        {"Temp9am", K::numeric, true},
        {"Temp3pm", K::numeric, true},
        {"RainToday", K::categorical, true},
        {"RISK_MM", K::numeric, true},
        {"RainTomorrow", K::binary_label, false},
    };
}

namespace {

// Splits one CSV record. Handles double-quoted fields with "" escapes;
// the caller strips the trailing \r beforehand.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

bool is_missing_token(const std::string& t) { return t.empty() || t == "NA"; }

double parse_numeric(const std::string& token, std::size_t row, const std::string& col) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw DataError("row " + std::to_string(row) + ", column '" + col +
                        "': cannot parse numeric value '" + token + "'");
    }
    return v;
}

Date parse_date(const std::string& token, std::size_t row, const std::string& col) {
    auto fail = [&]() -> Date {
        throw DataError("row " + std::to_string(row) + ", column '" + col +
                        "': cannot parse date '" + token + "' (expected YYYY-MM-DD)");
    };
    if (token.size() != 10 || token[4] != '-' || token[7] != '-') return fail();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (token[i] < '0' || token[i] > '9') return fail();
    }
    Date d;
    d.year = std::stoi(token.substr(0, 4));
    d.month = std::stoi(token.substr(5, 2));
    d.day = std::stoi(token.substr(8, 2));
    if (!is_valid_gregorian(d)) {
        throw DataError("row " + std::to_string(row) + ", column '" + col +
                        "': date '" + token + "' is not a valid calendar date");
    }
    return d;
}

} // namespace

Table load_csv(const std::filesystem::path& path, const std::vector<ColumnSchema>& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError("file has no header row: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_csv_line(line);
    if (header.size() != schema.size()) {
        throw DataError("header mismatch in " + path.string() + ": expected " +
                        std::to_string(schema.size()) + " columns, found " +
                        std::to_string(header.size()));
    }
    std::string bad;
    for (std::size_t j = 0; j < schema.size(); ++j) {
        if (header[j] != schema[j].name) {
            if (!bad.empty()) bad += ", ";
            bad += "position " + std::to_string(j) + ": expected '" + schema[j].name +
                   "', found '" + header[j] + "'";
        }
    }
    if (!bad.empty()) throw DataError("header mismatch in " + path.string() + ": " + bad);

    const std::size_t n_cols = schema.size();
    std::vector<ColumnData> columns(n_cols);
    std::vector<std::unordered_map<std::string, std::int32_t>> interners(n_cols);

    std::size_t label_idx = n_cols;
    for (std::size_t j = 0; j < n_cols; ++j) {
        if (schema[j].kind == ColumnKind::binary_label) label_idx = j;
    }

    std::size_t n_rows = 0;
    std::size_t dropped = 0;
    std::size_t file_row = 0; // data row number, 1-based, as present in the file

    // One row is parsed into scratch first so a dropped row leaves no trace.
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == EOF) break;
        ++file_row;
        fields = split_csv_line(line);
        if (fields.size() != n_cols) {
            throw DataError("row " + std::to_string(file_row) + ": expected " +
                            std::to_string(n_cols) + " fields, found " +
                            std::to_string(fields.size()));
        }
        if (label_idx < n_cols && is_missing_token(fields[label_idx])) {
            ++dropped;
            continue;
        }
        for (std::size_t j = 0; j < n_cols; ++j) {
            ColumnData& col = columns[j];
            const std::string& tok = fields[j];
            const bool missing = is_missing_token(tok);
            col.missing.push_back(missing ? 1 : 0);
            switch (schema[j].kind) {
                case ColumnKind::numeric:
                    col.numeric.push_back(missing ? 0.0 : parse_numeric(tok, file_row, schema[j].name));
                    break;
                case ColumnKind::date:
                    col.dates.push_back(missing ? Date{} : parse_date(tok, file_row, schema[j].name));
                    break;
                case ColumnKind::categorical: {
                    std::int32_t id = -1;
                    if (!missing) {
                        auto it = interners[j].find(tok);
                        if (it == interners[j].end()) {
                            id = static_cast<std::int32_t>(col.categories.size());
                            col.categories.push_back(tok);
                            interners[j].emplace(tok, id);
                        } else {
                            id = it->second;
                        }
                    }
                    col.cat_ids.push_back(id);
                    break;
                }
                case ColumnKind::binary_label: {
                    double v;
                    if (tok == "Yes" || tok == "1") {
                        v = 1.0;
                    } else if (tok == "No" || tok == "0") {
                        v = 0.0;
                    } else {
                        throw DataError("row " + std::to_string(file_row) + ", column '" +
                                        schema[j].name + "': cannot parse label '" + tok + "'");
                    }
                    col.numeric.push_back(v);
                    break;
                }
            }
        }
        ++n_rows;
    }

    return Table(std::vector<ColumnSchema>(schema), std::move(columns), n_rows, dropped);
}

void write_csv(const Table& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());

    const auto& schema = table.schema();
    for (std::size_t j = 0; j < schema.size(); ++j) {
        out << (j ? "," : "") << schema[j].name;
    }
    out << "\n";

    char buf[64];
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        for (std::size_t j = 0; j < schema.size(); ++j) {
            if (j) out << ',';
            if (table.is_missing(i, j)) {
                out << "NA";
                continue;
            }
            switch (schema[j].kind) {
                case ColumnKind::numeric:
                    std::snprintf(buf, sizeof(buf), "%.10g", table.numeric_at(i, j));
                    out << buf;
                    break;
                case ColumnKind::date: {
                    const Date d = table.date_at(i, j);
                    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
                    out << buf;
                    break;
                }
                case ColumnKind::categorical:
                    out << table.category_name(j, table.cat_id_at(i, j));
                    break;
                case ColumnKind::binary_label:
                    out << (table.numeric_at(i, j) != 0.0 ? "Yes" : "No");
                    break;
            }
        }
        out << "\n";
    }
}

ClassCounts class_counts(const LabelVector& labels) {
    ClassCounts c;
    for (std::uint8_t v : labels.values) {
        if (v) {
            ++c.n_positive;
        } else {
            ++c.n_negative;
        }
    }
    return c;
}

SplitPair split_holdout(std::size_t n_rows, const LabelVector& labels, double ratio,
                        std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw DataError("split_holdout: ratio must be in (0, 1)");
    }
    if (labels.size() != n_rows) {
        throw DataError("split_holdout: labels length does not match row count");
    }

    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < n_rows; ++i) by_class[labels[i] ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c) {
        if (by_class[c].size() < 2) {
            throw DataError("split_holdout: class " + std::to_string(c) +
                            " has fewer than 2 members, cannot stratify");
        }
    }

    SplitPair split;
    split.ratio = ratio;
    for (int c = 0; c < 2; ++c) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(c)));
        rng.shuffle(by_class[c]);
        const auto n_train = static_cast<std::size_t>(
            std::llround(ratio * static_cast<double>(by_class[c].size())));
        for (std::size_t i = 0; i < by_class[c].size(); ++i) {
            (i < n_train ? split.train_indices : split.test_indices).push_back(by_class[c][i]);
        }
    }
    std::sort(split.train_indices.begin(), split.train_indices.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    return split;
}

} // namespace rainpipe
