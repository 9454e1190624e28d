#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rainpipe {

// Dense row-major design matrix. Never holds missing values; preprocessing
// guarantees that before a matrix is built.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::size_t n_rows, std::vector<std::string> col_names)
        : n_rows_(n_rows),
          n_cols_(col_names.size()),
          col_names_(std::move(col_names)),
          values_(n_rows_ * n_cols_, 0.0) {}

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return n_cols_; }
    const std::vector<std::string>& col_names() const { return col_names_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * n_cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * n_cols_, n_cols_};
    }
    std::span<double> row(std::size_t i) {
        return {values_.data() + i * n_cols_, n_cols_};
    }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    // New matrix holding the given rows, in the given order.
    FeatureMatrix take_rows(const std::vector<std::size_t>& rows) const {
        FeatureMatrix out(rows.size(), col_names_);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto src = row(rows[r]);
            auto dst = out.row(r);
            for (std::size_t j = 0; j < n_cols_; ++j) dst[j] = src[j];
        }
        return out;
    }

    bool operator==(const FeatureMatrix& other) const = default;

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<std::string> col_names_;
    std::vector<double> values_;
};

// Binary target. values are 0/1; positive_meaning records what 1 stands for.
struct LabelVector {
    std::vector<std::uint8_t> values;
    std::string positive_meaning;

    std::size_t size() const { return values.size(); }
    std::uint8_t operator[](std::size_t i) const { return values[i]; }

    LabelVector take_rows(const std::vector<std::size_t>& rows) const {
        LabelVector out;
        out.positive_meaning = positive_meaning;
        out.values.reserve(rows.size());
        for (std::size_t r : rows) out.values.push_back(values[r]);
        return out;
    }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

} // namespace rainpipe
