#include "rainpipe/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rainpipe/errors.hpp"
#include "rainpipe/rng.hpp"

namespace rainpipe {

ConfusionMatrix confusion(const LabelVector& y_true, const std::vector<std::uint8_t>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw DataError("confusion: " + std::to_string(y_true.size()) + " labels vs " +
                        std::to_string(y_pred.size()) + " predictions");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_pred.size(); ++i) {
        if (y_true[i]) {
            ++(y_pred[i] ? cm.tp : cm.fn);
        } else {
            ++(y_pred[i] ? cm.fp : cm.tn);
        }
    }
    return cm;
}

BinaryMetrics binary_metrics(const ConfusionMatrix& cm) {
    const std::size_t n = cm.total();
    if (n == 0) throw DataError("metrics need at least one evaluated row");
    BinaryMetrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(n);
    if (cm.tp + cm.fp == 0) {
        m.precision_undefined = true; // 0/0 reported as 0 so reports serialize
    } else {
        m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    }
    if (cm.tp + cm.fn == 0) {
        m.recall_undefined = true;
    } else {
        m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    }
    const double pr = m.precision + m.recall;
    m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
    return m;
}

RocResult roc_auc(const LabelVector& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size()) {
        throw DataError("roc_auc: labels and scores differ in length");
    }
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) n1 += y_true[i];
    const std::size_t n0 = y_true.size() - n1;
    if (n1 == 0 || n0 == 0) {
        throw DataError("AUC is undefined when only one class is present");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
    });

    RocResult out;
    out.curve.push_back({0.0, 0.0});
    double auc = 0.0;
    std::size_t tp = 0, fp = 0;
    std::size_t pos = 0;
    while (pos < order.size()) {
        // one threshold per distinct score: the whole tie group flips at once,
        // drawing the diagonal segment the trapezoid rule needs
        const double s = scores[order[pos]];
        std::size_t group_tp = 0, group_fp = 0;
        while (pos < order.size() && scores[order[pos]] == s) {
            ++(y_true[order[pos]] ? group_tp : group_fp);
            ++pos;
        }
        const double fpr0 = static_cast<double>(fp) / static_cast<double>(n0);
        const double tpr0 = static_cast<double>(tp) / static_cast<double>(n1);
        tp += group_tp;
        fp += group_fp;
        const double fpr1 = static_cast<double>(fp) / static_cast<double>(n0);
        const double tpr1 = static_cast<double>(tp) / static_cast<double>(n1);
        auc += (fpr1 - fpr0) * (tpr0 + tpr1) * 0.5;
        out.curve.push_back({fpr1, tpr1});
    }
    out.auc = auc;
    return out;
}

FoldPlan stratified_kfold(const LabelVector& labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("k-fold needs k >= 2");
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.fold_of.assign(labels.size(), 0);
    for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        if (members.size() < k) {
            throw DataError("class " + std::to_string(cls) + " has only " +
                            std::to_string(members.size()) + " rows; cannot make " +
                            std::to_string(k) + " stratified folds");
        }
        Rng rng(mix_seed(seed, cls));
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) {
            plan.fold_of[members[i]] = i % k;
        }
    }
    return plan;
}

EvalReport evaluate_predictions(const LabelVector& y_true,
                                const std::vector<std::uint8_t>& y_pred,
                                const std::vector<double>& scores) {
    EvalReport report;
    report.confusion = confusion(y_true, y_pred);
    report.metrics = binary_metrics(report.confusion);
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) n1 += y_true[i];
    if (n1 > 0 && n1 < y_true.size()) {
        report.auc = roc_auc(y_true, scores).auc;
        report.auc_defined = true;
    }
    return report;
}

CvResult cross_validate(const FeatureMatrix& X, const LabelVector& y, const ClassifierSpec& spec,
                        const FoldPlan& plan, const ResamplePlan& resample_plan) {
    if (plan.fold_of.size() != y.size()) {
        throw DataError("fold plan covers " + std::to_string(plan.fold_of.size()) +
                        " rows, data has " + std::to_string(y.size()));
    }
    CvResult result;
    for (std::size_t f = 0; f < plan.k; ++f) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < plan.fold_of.size(); ++i) {
            (plan.fold_of[i] == f ? test_rows : train_rows).push_back(i);
        }
        FeatureMatrix X_train = X.take_rows(train_rows);
        LabelVector y_train = y.take_rows(train_rows);

        // the fold's training portion is the only thing ever resampled
        if (resample_plan.mode != ResampleMode::none) {
            ResamplePlan fold_resample = resample_plan;
            fold_resample.seed = mix_seed(resample_plan.seed, f);
            std::tie(X_train, y_train) = apply_resample(X_train, y_train, fold_resample);
        }

        ClassifierSpec fold_spec = spec;
        fold_spec.seed = mix_seed(spec.seed, f);
        auto model = make_classifier(fold_spec);
        model->fit(X_train, y_train);

        const FeatureMatrix X_test = X.take_rows(test_rows);
        const LabelVector y_test = y.take_rows(test_rows);
        EvalReport report =
            evaluate_predictions(y_test, model->predict(X_test), model->score(X_test));
        result.fold_accuracies.push_back(report.metrics.accuracy);
        result.fold_reports.push_back(std::move(report));
    }

    const double k = static_cast<double>(plan.k);
    double mean = 0.0;
    for (double a : result.fold_accuracies) mean += a;
    mean /= k;
    double ss = 0.0;
    for (double a : result.fold_accuracies) ss += (a - mean) * (a - mean);
    result.mean_accuracy = mean;
    result.std_accuracy = plan.k > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
    return result;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw NumericError("beta parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    // the continued fraction converges fast only below the distribution's
    // bulk; above it, use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DataError("paired t-test needs equal-length score lists");
    if (a.size() < 2) throw DataError("paired t-test needs at least 2 pairs");
    const std::size_t n = a.size();

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    TTestResult result;
    result.df = n - 1;
    if (sd == 0.0) {
        if (mean == 0.0) {
            result.t = 0.0;
            result.p = 1.0;
        } else {
            // identical nonzero differences: the statistic degenerates
            result.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
            result.p = 0.0;
        }
        return result;
    }
    result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    const double df = static_cast<double>(result.df);
    result.p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + result.t * result.t));
    return result;
}

} // namespace rainpipe
