#include "rainpipe/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

#include "rainpipe/errors.hpp"
#include "rainpipe/rng.hpp"

namespace rainpipe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool contains(const std::vector<std::string>& names, const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::string fmt(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

// RFC-4180: quote a field only when it needs it, doubling inner quotes.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
        out += ok ? c : '_';
    }
    return out.empty() ? std::string("model") : out;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
    if (data_path.empty()) throw ConfigError("data_path must be set");
    if (report_dir.empty()) throw ConfigError("report_dir must be set");
    if (models.empty()) throw ConfigError("models must be nonempty");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw ConfigError("split_ratio must be in (0, 1), got " + fmt(split_ratio, 4));
    }
    if (cv_k < 2) throw ConfigError("cv_k must be at least 2");
    if (selector_k < 1) throw ConfigError("selector_k must be at least 1");
    if (resample.mode == ResampleMode::smote && resample.k_neighbors < 1) {
        throw ConfigError("smote requires k_neighbors >= 1");
    }
    if (contains(feature_columns, "RISK_MM")) {
        throw ConfigError("RISK_MM encodes the target and cannot be used as a feature (leakage)");
    }
    std::set<std::string> names;
    for (const auto& spec : models) {
        spec.validate();
        if (!names.insert(spec.display_name()).second) {
            throw ConfigError("duplicate model name '" + spec.display_name() + "'");
        }
    }
}

json ExperimentConfig::to_json() const {
    json model_list = json::array();
    for (const auto& spec : models) model_list.push_back(spec.to_json());
    return json{{"data_path", data_path},
                {"seed", seed},
                {"selector_k", selector_k},
                {"hash_width", hash_width},
                {"hash_signed", hash_signed},
                {"resample", resample.to_json()},
                {"split_ratio", split_ratio},
                {"models", std::move(model_list)},
                {"cv_k", cv_k},
                {"report_dir", report_dir},
                {"feature_columns", feature_columns},
                {"knn_eval_cap", knn_eval_cap},
                {"reference_note", reference_note}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    static const std::set<std::string> known = {
        "data_path",   "seed",   "selector_k",      "hash_width",   "hash_signed",
        "resample",    "split_ratio", "models",     "cv_k",         "report_dir",
        "feature_columns", "knn_eval_cap", "reference_note"};
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& item : j.items()) {
        if (!known.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
    }
    ExperimentConfig c;
    if (j.contains("data_path")) c.data_path = j.at("data_path").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("selector_k")) c.selector_k = j.at("selector_k").get<std::size_t>();
    if (j.contains("hash_width")) c.hash_width = j.at("hash_width").get<std::size_t>();
    if (j.contains("hash_signed")) c.hash_signed = j.at("hash_signed").get<bool>();
    if (j.contains("resample")) c.resample = ResamplePlan::from_json(j.at("resample"));
    if (j.contains("split_ratio")) c.split_ratio = j.at("split_ratio").get<double>();
    if (j.contains("models")) {
        for (const auto& item : j.at("models")) c.models.push_back(ClassifierSpec::from_json(item));
    }
    if (j.contains("cv_k")) c.cv_k = j.at("cv_k").get<std::size_t>();
    if (j.contains("report_dir")) c.report_dir = j.at("report_dir").get<std::string>();
    if (j.contains("feature_columns")) {
        c.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
    }
    if (j.contains("knn_eval_cap")) c.knn_eval_cap = j.at("knn_eval_cap").get<std::size_t>();
    if (j.contains("reference_note")) c.reference_note = j.at("reference_note").get<std::string>();
    return c;
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

ExperimentConfig make_preset(int number, const std::string& data_path, std::uint64_t seed,
                             const std::string& report_dir) {
    if (number < 1 || number > 3) {
        throw ConfigError("unknown preset experiment" + std::to_string(number) +
                          " (valid: experiment1, experiment2, experiment3)");
    }
    ExperimentConfig c;
    c.data_path = data_path;
    c.seed = seed;
    c.report_dir = report_dir;

    switch (number) {
        case 1:
            c.resample.mode = ResampleMode::none;
            c.reference_note =
                "Reference expectation: the boosted-tree configs lead on the unbalanced data, "
                "gbm_lr25 strongest; random_forest and decision_table trail.";
            break;
        case 2:
            c.resample.mode = ResampleMode::undersample_random;
            c.reference_note =
                "Reference expectation: logreg leads on the undersampled data; "
                "decision_table trails.";
            break;
        default:
            c.resample.mode = ResampleMode::smote;
            c.resample.k_neighbors = 5;
            c.reference_note =
                "Reference expectation: decision_table leads on the oversampled data; "
                "logreg trails.";
            break;
    }
    c.resample.seed = mix_seed(seed, 2);

    auto add = [&c, seed](ModelKind kind, json hp, const std::string& name) {
        ClassifierSpec spec;
        spec.kind = kind;
        spec.hyperparameters = std::move(hp);
        spec.seed = mix_seed(seed, 100 + c.models.size());
        spec.name = name;
        c.models.push_back(std::move(spec));
    };

    add(ModelKind::logreg, {{"learning_rate", 0.1}, {"n_iters", 1000}, {"l2", 0.0}}, "logreg");
    add(ModelKind::tree, {{"max_depth", 0}, {"min_samples_split", 2}}, "tree");
    add(ModelKind::knn, {{"k", 25}}, "knn_k25");
    add(ModelKind::knn, {{"k", 27}}, "knn_k27");
    add(ModelKind::knn, {{"k", 29}}, "knn_k29");
    add(ModelKind::decision_table, {{"n_bins", 10}, {"max_subset_size", 4}, {"cv_folds", 5}},
        "decision_table");
    add(ModelKind::random_forest,
        {{"n_estimators", 100}, {"max_depth", 4}, {"max_features", "sqrt"}, {"bootstrap", true}},
        "random_forest");
    add(ModelKind::adaboost, {{"n_estimators", 50}}, "adaboost");
    add(ModelKind::gbm,
        {{"n_estimators", 100}, {"learning_rate", 0.05}, {"max_depth", 2}, {"max_features", 2}},
        "gbm_lr05");
    add(ModelKind::gbm,
        {{"n_estimators", 100}, {"learning_rate", 0.1}, {"max_depth", 2}, {"max_features", 2}},
        "gbm_lr10");
    add(ModelKind::gbm,
        {{"n_estimators", 100}, {"learning_rate", 0.25}, {"max_depth", 2}, {"max_features", 2}},
        "gbm_lr25");
    return c;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

namespace {

struct TTestRow {
    std::string a;
    std::string b;
    TTestResult result;
};

void write_metrics_csv(const fs::path& path, const ExperimentConfig& config,
                       const std::vector<ModelOutcome>& outcomes) {
    auto out = open_out(path);
    out << "model,split,fold,accuracy,precision,recall,f1,auc,tp,fp,tn,fn\n";
    auto row = [&out](const std::string& model, const std::string& split, const std::string& fold,
                      const EvalReport& r) {
        out << csv_field(model) << ',' << split << ',' << fold << ',' << fmt(r.metrics.accuracy, 9)
            << ',' << fmt(r.metrics.precision, 9) << ',' << fmt(r.metrics.recall, 9) << ','
            << fmt(r.metrics.f1, 9) << ',' << (r.auc_defined ? fmt(r.auc, 9) : std::string())
            << ',' << r.confusion.tp << ',' << r.confusion.fp << ',' << r.confusion.tn << ','
            << r.confusion.fn << '\n';
    };
    for (std::size_t m = 0; m < outcomes.size(); ++m) {
        const ModelOutcome& o = outcomes[m];
        for (std::size_t f = 0; f < o.cv.fold_reports.size(); ++f) {
            row(o.name, "cv", std::to_string(f), o.cv.fold_reports[f]);
        }
        row(o.name, "holdout", "", o.holdout);
    }
    (void)config;
}

void write_roc_csv(const fs::path& path, const RocResult& roc) {
    auto out = open_out(path);
    out << "fpr,tpr\n";
    for (const RocPoint& p : roc.curve) {
        out << fmt(p.fpr, 9) << ',' << fmt(p.tpr, 9) << '\n';
    }
}

std::string describe_resample(const ResamplePlan& plan) {
    switch (plan.mode) {
        case ResampleMode::none: return "none";
        case ResampleMode::undersample_random: return "random undersampling of the majority class";
        case ResampleMode::undersample_distance:
            return "distance-based undersampling of the majority class";
        case ResampleMode::smote:
            return "SMOTE oversampling of the minority class (k_neighbors = " +
                   std::to_string(plan.k_neighbors) + ")";
    }
    return "none";
}

void write_report_md(const fs::path& path, const ExperimentConfig& config, const Table& raw,
                     const SplitPair& split, const PipelineModel& pipe, bool risk_present,
                     const ExperimentResult& result, const std::vector<TTestRow>& ttests,
                     bool cap_engaged, std::size_t capped_rows, std::size_t test_rows) {
    auto out = open_out(path);
    const ClassCounts all = class_counts(raw.labels());

    out << "# Rainfall prediction run\n\n";

    out << "## Data\n\n";
    out << "- source: `" << config.data_path << "`\n";
    out << "- rows: " << raw.n_rows() << " (rows dropped for missing label: "
        << raw.dropped_unlabeled() << ")\n";
    out << "- target: " << raw.labels().positive_meaning << "\n";
    out << "- classes: No = " << all.n_negative << ", Yes = " << all.n_positive << "\n\n";
    if (risk_present) {
        out << "> Leakage note: RISK_MM records the rain amount that defines the target, so it is "
               "dropped before any fitting and cannot be requested as a feature.\n\n";
    }

    out << "## Preprocessing\n\n";
    out << "- imputation: per-(Location, month) mean for numeric columns and mode for "
           "categorical columns, with global fallback\n";
    out << "- date expansion: Date -> Year, Month, Day\n";
    out << "- encoding: wind directions hashed to " << config.hash_width << " columns ("
        << (config.hash_signed ? "signed" : "unsigned") << "); other categoricals one-hot\n";
    out << "- scaling: per-column min-max to [0, 1]\n";
    out << "- selection: chi-squared, top " << config.selector_k << " of "
        << pipe.pre_selection_columns().size() << " columns\n";
    out << "- selected features (chi2 score):";
    const auto& pre_cols = pipe.pre_selection_columns();
    const auto& scores = pipe.selector_scores();
    for (std::size_t i = 0; i < result.selected_features.size(); ++i) {
        const std::string& name = result.selected_features[i];
        const auto it = std::find(pre_cols.begin(), pre_cols.end(), name);
        const std::size_t j = static_cast<std::size_t>(it - pre_cols.begin());
        out << (i == 0 ? " " : ", ") << name << " (" << fmt(scores[j], 2) << ")";
    }
    out << "\n";
    if (pipe.unseen_category_rows() > 0) {
        out << "- categories unseen at fit time: " << pipe.unseen_category_rows()
            << " row-cells encoded as all-zero\n";
    }
    out << "\n";

    out << "## Training split\n\n";
    out << "- holdout ratio " << fmt(split.ratio, 2) << ": " << split.train_indices.size()
        << " train rows, " << split.test_indices.size() << " test rows (stratified)\n";
    out << "- resampling: " << describe_resample(config.resample) << "\n";
    out << "- train class counts before resampling: No = " << result.train_before.n_negative
        << ", Yes = " << result.train_before.n_positive << "\n";
    out << "- train class counts after resampling: No = " << result.train_after.n_negative
        << ", Yes = " << result.train_after.n_positive << "\n\n";

    out << "## Holdout metrics\n\n";
    out << "| model | accuracy | precision | recall | f1 | auc |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const ModelOutcome& o : result.models) {
        out << "| " << o.name << " | " << fmt(o.holdout.metrics.accuracy, 4) << " | "
            << fmt(o.holdout.metrics.precision, 4) << " | " << fmt(o.holdout.metrics.recall, 4)
            << " | " << fmt(o.holdout.metrics.f1, 4) << " | "
            << (o.holdout.auc_defined ? fmt(o.holdout.auc, 4) : std::string("-")) << " |\n";
    }
    out << "\n";
    if (cap_engaged) {
        out << "> knn holdout metrics are computed on a seeded subsample of " << capped_rows
            << " of the " << test_rows << " test rows (knn_eval_cap).\n\n";
    }

    out << "## Cross-validation (" << config.cv_k << "-fold, stratified, on the training split)\n\n";
    out << "| model | mean accuracy | std |\n";
    out << "|---|---|---|\n";
    for (const ModelOutcome& o : result.models) {
        out << "| " << o.name << " | " << fmt(o.cv.mean_accuracy, 4) << " | "
            << fmt(o.cv.std_accuracy, 4) << " |\n";
    }
    out << "\n";

    out << "Ranking by CV mean accuracy:\n\n";
    for (std::size_t i = 0; i < result.ranking.size(); ++i) {
        out << (i + 1) << ". " << result.ranking[i] << "\n";
    }
    out << "\n";

    if (!ttests.empty()) {
        out << "## Paired t-tests (top " << std::min<std::size_t>(3, result.models.size())
            << " by CV mean accuracy)\n\n";
        out << "| model A | model B | t | p (two-sided) | df |\n";
        out << "|---|---|---|---|---|\n";
        for (const TTestRow& row : ttests) {
            out << "| " << row.a << " | " << row.b << " | " << fmt(row.result.t, 4) << " | "
                << fmt(row.result.p, 4) << " | " << row.result.df << " |\n";
        }
        out << "\n";
        out << "> Caveat: the folds share training rows, so the per-fold accuracies are not "
               "independent samples; p-values are reported uncorrected.\n\n";
    }

    if (!config.reference_note.empty()) {
        out << "## Reference expectations\n\n";
        out << config.reference_note << "\n";
    }
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const Table raw = load_csv(config.data_path, weather_schema());
    for (const auto& name : config.feature_columns) {
        if (!raw.has_column(name)) {
            throw ConfigError("unknown column '" + name + "' in feature_columns");
        }
    }
    const bool risk_present = raw.has_column("RISK_MM");
    const std::size_t label_j = raw.label_col();

    PipelineModel::FitConfig fit_config;
    fit_config.drop.clear();
    if (risk_present) fit_config.drop.push_back("RISK_MM");
    if (!config.feature_columns.empty()) {
        for (std::size_t j = 0; j < raw.n_cols(); ++j) {
            const ColumnSchema& cs = raw.col_schema(j);
            if (j == label_j || cs.name == "RISK_MM") continue;
            if (!contains(config.feature_columns, cs.name)) fit_config.drop.push_back(cs.name);
        }
    }
    fit_config.hash_width = config.hash_width;
    fit_config.hash_signed = config.hash_signed;
    fit_config.selector_k = config.selector_k;

    const LabelVector y_all = raw.labels();
    const SplitPair split =
        split_holdout(raw.n_rows(), y_all, config.split_ratio, mix_seed(config.seed, 1));

    const PipelineModel pipe = PipelineModel::fit(raw, split.train_indices, fit_config);
    const FeatureMatrix X_all = pipe.apply(raw);

    const FeatureMatrix X_train = X_all.take_rows(split.train_indices);
    const FeatureMatrix X_test = X_all.take_rows(split.test_indices);
    const LabelVector y_train = y_all.take_rows(split.train_indices);
    const LabelVector y_test = y_all.take_rows(split.test_indices);

    ExperimentResult result;
    result.report_dir = fs::path(config.report_dir);
    result.selected_features = pipe.selected_features();
    result.train_before = class_counts(y_train);

    const auto [X_fit, y_fit] = apply_resample(X_train, y_train, config.resample);
    result.train_after = class_counts(y_fit);

    const FoldPlan plan = stratified_kfold(y_train, config.cv_k, mix_seed(config.seed, 3));

    // One shared seeded subsample keeps every capped knn comparable.
    bool any_knn = false;
    for (const auto& spec : config.models) any_knn |= spec.kind == ModelKind::knn;
    const bool cap_engaged =
        any_knn && config.knn_eval_cap > 0 && X_test.n_rows() > config.knn_eval_cap;
    FeatureMatrix X_test_cap;
    LabelVector y_test_cap;
    if (cap_engaged) {
        Rng rng(mix_seed(config.seed, 4));
        const std::vector<std::size_t> rows =
            rng.sample_without_replacement(X_test.n_rows(), config.knn_eval_cap);
        X_test_cap = X_test.take_rows(rows);
        y_test_cap = y_test.take_rows(rows);
    }

    fs::create_directories(result.report_dir / "models");

    for (const ClassifierSpec& spec : config.models) {
        auto clf = make_classifier(spec);
        clf->fit(X_fit, y_fit);

        const bool use_cap = cap_engaged && spec.kind == ModelKind::knn;
        const FeatureMatrix& X_eval = use_cap ? X_test_cap : X_test;
        const LabelVector& y_eval = use_cap ? y_test_cap : y_test;
        const std::vector<double> scores = clf->score(X_eval);
        const std::vector<std::uint8_t> preds = clf->predict(X_eval);
        const EvalReport holdout = evaluate_predictions(y_eval, preds, scores);

        const CvResult cv = cross_validate(X_train, y_train, spec, plan, config.resample);
        result.models.push_back({spec.display_name(), holdout, cv});

        const std::string stem = sanitize_filename(spec.display_name());
        if (holdout.auc_defined) {
            write_roc_csv(result.report_dir / ("roc_" + stem + ".csv"), roc_auc(y_eval, scores));
        }
        auto model_out = open_out(result.report_dir / "models" / (stem + ".json"));
        model_out << clf->to_json().dump(2) << '\n';
    }

    std::vector<std::size_t> order(result.models.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&result](std::size_t a, std::size_t b) {
        return result.models[a].cv.mean_accuracy > result.models[b].cv.mean_accuracy;
    });
    for (std::size_t i : order) result.ranking.push_back(result.models[i].name);

    std::vector<TTestRow> ttests;
    const std::size_t top = std::min<std::size_t>(3, order.size());
    for (std::size_t a = 0; a < top; ++a) {
        for (std::size_t b = a + 1; b < top; ++b) {
            const ModelOutcome& ma = result.models[order[a]];
            const ModelOutcome& mb = result.models[order[b]];
            ttests.push_back(
                {ma.name, mb.name, paired_t_test(ma.cv.fold_accuracies, mb.cv.fold_accuracies)});
        }
    }

    write_metrics_csv(result.report_dir / "metrics.csv", config, result.models);
    write_report_md(result.report_dir / "report.md", config, raw, split, pipe, risk_present,
                    result, ttests, cap_engaged, config.knn_eval_cap, X_test.n_rows());

    {
        auto out = open_out(result.report_dir / "selected_features.txt");
        for (const auto& name : result.selected_features) out << name << '\n';
    }
    {
        auto out = open_out(result.report_dir / "pipeline.json");
        out << pipe.to_json().dump(2) << '\n';
    }
    {
        auto out = open_out(result.report_dir / "config.json");
        out << config.to_json().dump(2) << '\n';
    }
    return result;
}

// ---------------------------------------------------------------------------
// explore
// ---------------------------------------------------------------------------

ExploreResult explore(const std::filesystem::path& data_path) {
    const Table t = load_csv(data_path, weather_schema());
    ExploreResult r;
    r.n_rows = t.n_rows();
    r.dropped_unlabeled = t.dropped_unlabeled();
    r.classes = class_counts(t.labels());

    for (std::size_t j = 0; j < t.n_cols(); ++j) {
        const ColumnSchema& cs = t.col_schema(j);
        ColumnSummary s;
        s.name = cs.name;
        s.kind = to_string(cs.kind);
        std::size_t missing = 0;
        for (std::size_t i = 0; i < t.n_rows(); ++i) missing += t.is_missing(i, j) ? 1 : 0;
        s.count = t.n_rows() - missing;
        s.missing_fraction =
            t.n_rows() == 0 ? 0.0 : static_cast<double>(missing) / static_cast<double>(t.n_rows());
        if ((cs.kind == ColumnKind::numeric || cs.kind == ColumnKind::binary_label) &&
            s.count > 0) {
            double sum = 0.0, lo = 0.0, hi = 0.0;
            bool first = true;
            for (std::size_t i = 0; i < t.n_rows(); ++i) {
                if (t.is_missing(i, j)) continue;
                const double v = t.numeric_at(i, j);
                sum += v;
                lo = first ? v : std::min(lo, v);
                hi = first ? v : std::max(hi, v);
                first = false;
            }
            const double mean = sum / static_cast<double>(s.count);
            s.mean = mean;
            s.min = lo;
            s.max = hi;
            if (s.count >= 2) {
                double ss = 0.0;
                for (std::size_t i = 0; i < t.n_rows(); ++i) {
                    if (t.is_missing(i, j)) continue;
                    const double d = t.numeric_at(i, j) - mean;
                    ss += d * d;
                }
                s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
            }
        }
        r.columns.push_back(std::move(s));
    }

    if (t.n_rows() >= 2) {
        // Numeric columns plus the 0/1 target, missing cells filled with the
        // column's global mean so every pair uses all rows.
        std::vector<std::size_t> cols;
        std::vector<std::string> names;
        for (std::size_t j = 0; j < t.n_cols(); ++j) {
            if (t.col_schema(j).kind == ColumnKind::numeric) {
                cols.push_back(j);
                names.push_back(t.col_schema(j).name);
            }
        }
        const LabelVector labels = t.labels();
        names.push_back(t.col_schema(t.label_col()).name);
        FeatureMatrix m(t.n_rows(), names);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const std::size_t j = cols[c];
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t i = 0; i < t.n_rows(); ++i) {
                if (t.is_missing(i, j)) continue;
                sum += t.numeric_at(i, j);
                ++n;
            }
            const double mean = n == 0 ? 0.0 : sum / static_cast<double>(n);
            for (std::size_t i = 0; i < t.n_rows(); ++i) {
                m(i, c) = t.is_missing(i, j) ? mean : t.numeric_at(i, j);
            }
        }
        for (std::size_t i = 0; i < t.n_rows(); ++i) {
            m(i, cols.size()) = labels[i];
        }
        r.correlation_names = names;
        r.correlation = pearson_correlation(m, labels).matrix;
    }
    return r;
}

void write_explore_report(const ExploreResult& r, std::ostream& out) {
    out << "# Data exploration\n\n";
    out << "rows: " << r.n_rows << " (rows dropped for missing label: " << r.dropped_unlabeled
        << ")\n";
    out << "classes: No = " << r.classes.n_negative << ", Yes = " << r.classes.n_positive
        << "\n\n";

    out << "| column | kind | count | missing% | mean | std | min | max |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? fmt(*v, 4) : std::string();
    };
    for (const ColumnSummary& s : r.columns) {
        out << "| " << s.name << " | " << s.kind << " | " << s.count << " | "
            << fmt(s.missing_fraction * 100.0, 1) << " | " << opt(s.mean) << " | "
            << opt(s.stddev) << " | " << opt(s.min) << " | " << opt(s.max) << " |\n";
    }
    out << "\n";

    out << "## Pearson correlation (numeric columns and the 0/1 target)\n\n";
    if (r.correlation.empty()) {
        out << "not computed: fewer than 2 rows\n";
        return;
    }
    out << "Missing cells are filled with the column's global mean before correlating.\n\n";
    out << "column";
    for (const auto& name : r.correlation_names) out << ',' << csv_field(name);
    out << '\n';
    for (std::size_t i = 0; i < r.correlation.size(); ++i) {
        out << csv_field(r.correlation_names[i]);
        for (double v : r.correlation[i]) out << ',' << fmt(v, 6);
        out << '\n';
    }
}

void write_correlation_csv(const ExploreResult& r, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "column";
    for (const auto& name : r.correlation_names) out << ',' << csv_field(name);
    out << '\n';
    for (std::size_t i = 0; i < r.correlation.size(); ++i) {
        out << csv_field(r.correlation_names[i]);
        for (double v : r.correlation[i]) out << ',' << fmt(v, 6);
        out << '\n';
    }
}

} // namespace rainpipe
