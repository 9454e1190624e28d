#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rainpipe/matrix.hpp"
#include "rainpipe/models.hpp"
#include "rainpipe/resample.hpp"

namespace rainpipe {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
};

struct BinaryMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false; // tp + fp == 0, reported as 0
    bool recall_undefined = false;    // tp + fn == 0, reported as 0
};

struct EvalReport {
    ConfusionMatrix confusion;
    BinaryMetrics metrics;
    double auc = 0.0;
    bool auc_defined = false;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    double auc = 0.0;
    std::vector<RocPoint> curve; // anchored at (0,0) and (1,1)
};

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> fold_of; // per-row fold id in [0, k)
    std::uint64_t seed = 0;
};

struct CvResult {
    std::vector<EvalReport> fold_reports;
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0; // sample std, n-1 denominator
};

struct TTestResult {
    double t = 0.0;
    double p = 1.0; // two-sided
    std::size_t df = 0;
};

ConfusionMatrix confusion(const LabelVector& y_true, const std::vector<std::uint8_t>& y_pred);

// accuracy/precision/recall/F1 from counts; 0/0 ratios come back as 0
// with the corresponding flag set so reports always serialize.
BinaryMetrics binary_metrics(const ConfusionMatrix& cm);

// ROC by thresholding at each distinct score with ties grouped; AUC by
// the trapezoid rule, which equals (concordant + ties/2) / (n1*n0).
RocResult roc_auc(const LabelVector& y_true, const std::vector<double>& scores);

// Per class: seeded shuffle, then deal round-robin into k folds. Folds
// are disjoint, cover every row, and hold each class's count within one
// of even.
FoldPlan stratified_kfold(const LabelVector& labels, std::size_t k, std::uint64_t seed);

// Fits on the rows outside each fold (resampling, when configured,
// applies to that training portion only) and evaluates on the fold.
// Fold f derives its seeds from (spec.seed, f) and (resample.seed, f).
CvResult cross_validate(const FeatureMatrix& X, const LabelVector& y, const ClassifierSpec& spec,
                        const FoldPlan& plan, const ResamplePlan& resample_plan = {});

// Two-sided paired t-test on matched score lists; p via the regularized
// incomplete beta function. All-zero differences give t = 0, p = 1.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, absolute error ~1e-12.
double regularized_incomplete_beta(double a, double b, double x);

// EvalReport over predictions and scores in one step.
EvalReport evaluate_predictions(const LabelVector& y_true, const std::vector<std::uint8_t>& y_pred,
                                const std::vector<double>& scores);

} // namespace rainpipe
