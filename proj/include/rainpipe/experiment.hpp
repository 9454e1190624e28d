#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rainpipe/dataset.hpp"
#include "rainpipe/eval.hpp"
#include "rainpipe/models.hpp"
#include "rainpipe/pipeline.hpp"
#include "rainpipe/resample.hpp"

namespace rainpipe {

// One experiment, declaratively. Serializes verbatim as the run's
// resolved config; re-running from that file reproduces every output
// byte for byte.
struct ExperimentConfig {
    std::string data_path;
    std::uint64_t seed = 42;
    std::size_t selector_k = 4;
    std::size_t hash_width = 8;
    bool hash_signed = true;
    ResamplePlan resample;
    double split_ratio = 0.75;
    std::vector<ClassifierSpec> models;
    std::size_t cv_k = 10;
    std::string report_dir;
    // Optional explicit feature subset (raw column names). RISK_MM is
    // rejected here: it encodes the target.
    std::vector<std::string> feature_columns;
    // Optional cap on rows scored per evaluation for knn models (0 = off).
    std::size_t knn_eval_cap = 0;
    // Free-form note printed in the report (presets carry their
    // reference expectations here).
    std::string reference_note;

    void validate() const; // throws ConfigError
    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

// The three built-in presets: 1 = original data, 2 = undersampled,
// 3 = oversampled (SMOTE). Model seeds are derived from `seed`.
ExperimentConfig make_preset(int number, const std::string& data_path, std::uint64_t seed,
                             const std::string& report_dir);

struct ModelOutcome {
    std::string name;
    EvalReport holdout;
    CvResult cv;
};

struct ExperimentResult {
    std::filesystem::path report_dir;
    std::vector<ModelOutcome> models;
    ClassCounts train_before;
    ClassCounts train_after;
    std::vector<std::string> selected_features;
    std::vector<std::string> ranking; // by CV mean accuracy, best first
};

// Runs the full chain: load, drop leaky columns, fit transforms on the
// training split, resample the training rows, fit every model, holdout
// metrics, stratified CV, paired t-tests among the top three by CV mean
// accuracy. Writes metrics.csv, report.md, roc_<model>.csv,
// selected_features.txt, pipeline.json, models/*.json and config.json
// into report_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct ColumnSummary {
    std::string name;
    std::string kind;
    std::size_t count = 0; // non-missing
    double missing_fraction = 0.0;
    std::optional<double> mean, stddev, min, max;
};

struct ExploreResult {
    std::vector<ColumnSummary> columns;
    ClassCounts classes;
    std::size_t n_rows = 0;
    std::size_t dropped_unlabeled = 0;
    std::vector<std::string> correlation_names;
    std::vector<std::vector<double>> correlation; // empty when n_rows < 2
};

// Summary statistics, class distribution and the numeric-column Pearson
// correlation matrix (global-mean imputation, documented in the output).
ExploreResult explore(const std::filesystem::path& data_path);

void write_explore_report(const ExploreResult& r, std::ostream& out);
void write_correlation_csv(const ExploreResult& r, const std::filesystem::path& path);

} // namespace rainpipe
