// Release gate for the rainfall toolkit: runs the eight acceptance criteria
// end to end and prints one PASS/FAIL line per criterion, then an overall
// verdict. Exit status is 0 only when every hard criterion passes; criterion
// 7 is qualitative, so its rankings are printed for comparison but never
// asserted.
//
// Dataset resolution: the first command-line argument, else the file named
// by $RAINPIPE_WEATHER_CSV, else a deterministic synthetic replica with the
// same schema, class counts and missing-value profile, generated under a
// scratch directory that is removed on exit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "rainpipe/dataset.hpp"
#include "rainpipe/eval.hpp"
#include "rainpipe/experiment.hpp"
#include "rainpipe/models.hpp"
#include "rainpipe/pipeline.hpp"
#include "rainpipe/preprocess.hpp"
#include "rainpipe/resample.hpp"
#include "rainpipe/rng.hpp"
#include "rainpipe/synth.hpp"

namespace fs = std::filesystem;
using namespace rainpipe;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
    char buf[4096];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> extra_lines; // printed indented under the criterion
};

struct Gate {
    fs::path data_csv;
    std::string data_desc;
    fs::path scratch;
    fs::path cli_bin;
    std::optional<Table> table; // loaded by criterion 1, reused afterwards
};

double accuracy_of(const std::vector<std::uint8_t>& pred, const LabelVector& y) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < y.size(); ++i) ok += pred[i] == y[i];
    return static_cast<double>(ok) / static_cast<double>(y.size());
}

// ---------------------------------------------------------------------------
// criterion 1: dataset facts — exact class counts, missing-value profile,
// and a load-time bound
// ---------------------------------------------------------------------------

Outcome criterion1(Gate& g) {
    const auto t0 = Clock::now();
    Table t = load_csv(g.data_csv, weather_schema());
    const ClassCounts cc = class_counts(t.labels());
    const double load_s = seconds_since(t0);

    const bool counts_ok = cc.n_negative == 110316 && cc.n_positive == 31877;

    struct Band {
        const char* col;
        double expect;
    };
    const Band bands[] = {
        {"Sunshine", 0.43}, {"Evaporation", 0.48}, {"Cloud3pm", 0.40}, {"Cloud9am", 0.38}};
    bool missing_ok = true;
    std::string missing_txt;
    for (const Band& b : bands) {
        const ColumnData& col = t.column(t.col_index(b.col));
        std::size_t miss = 0;
        for (std::uint8_t m : col.missing) miss += m;
        const double frac = static_cast<double>(miss) / static_cast<double>(t.n_rows());
        missing_ok = missing_ok && std::abs(frac - b.expect) <= 0.02;
        missing_txt += fmt(" %s %.1f%%", b.col, 100.0 * frac);
    }

    Outcome o;
    o.pass = counts_ok && missing_ok && load_s < 30.0;
    o.detail = fmt(
        "class counts No = %zu, Yes = %zu (want 110316/31877); missing%s (bands: 43/48/40/38 "
        "+-2pp); %zu rows loaded in %.1f s (bound 30 s)",
        cc.n_negative, cc.n_positive, missing_txt.c_str(), t.n_rows(), load_s);
    g.table = std::move(t);
    return o;
}

// ---------------------------------------------------------------------------
// criterion 2: resampling properties on a 1,000-row subsample of the
// fitted feature matrix — balance, bit-exact undersample subsets, and a
// convex-combination-with-true-k-NN oracle for every synthetic row
// ---------------------------------------------------------------------------

Outcome criterion2(Gate& g) {
    if (!g.table) return {false, "skipped: the dataset did not load in criterion 1", {}};
    const Table& t = *g.table;
    const LabelVector y = t.labels();

    const SplitPair sp = split_holdout(t.n_rows(), y, 0.75, mix_seed(42, 1));
    PipelineModel::FitConfig fc;
    fc.drop = {"RISK_MM"};
    const PipelineModel pipe = PipelineModel::fit(t, sp.train_indices, fc);
    const FeatureMatrix X_all = pipe.apply(t);

    Rng rng(mix_seed(42, 6));
    const std::vector<std::size_t> sub =
        rng.sample_without_replacement(t.n_rows(), std::min<std::size_t>(1000, t.n_rows()));
    const FeatureMatrix X = X_all.take_rows(sub);
    const LabelVector ys = y.take_rows(sub);

    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) (ys[i] ? n1 : n0) += 1;
    const std::size_t n_min = std::min(n0, n1);
    const std::size_t n_max = std::max(n0, n1);

    auto keyed = [](const FeatureMatrix& m, const LabelVector& lab, std::size_t i) {
        std::vector<double> k(m.row(i).begin(), m.row(i).end());
        k.push_back(static_cast<double>(lab[i]));
        return k;
    };
    std::map<std::vector<double>, long> pool;
    for (std::size_t i = 0; i < X.n_rows(); ++i) pool[keyed(X, ys, i)] += 1;

    bool pass = true;
    std::string parts;
    for (const ResampleMode mode :
         {ResampleMode::undersample_random, ResampleMode::undersample_distance}) {
        ResamplePlan plan;
        plan.mode = mode;
        plan.seed = mix_seed(42, 7);
        const auto [Xr, yr] = undersample(X, ys, plan);
        std::size_t r0 = 0, r1 = 0;
        for (std::size_t i = 0; i < yr.size(); ++i) (yr[i] ? r1 : r0) += 1;
        std::map<std::vector<double>, long> remaining = pool;
        bool subset = true;
        for (std::size_t i = 0; i < Xr.n_rows() && subset; ++i) {
            const auto it = remaining.find(keyed(Xr, yr, i));
            if (it == remaining.end() || it->second == 0) {
                subset = false;
            } else {
                it->second -= 1;
            }
        }
        const bool balanced = r0 == n_min && r1 == n_min;
        pass = pass && balanced && subset;
        parts += fmt("%s %zu/%zu%s%s; ", to_string(mode), r0, r1,
                     balanced ? "" : " NOT BALANCED", subset ? "" : " NOT A SUBSET");
    }

    ResamplePlan splan;
    splan.mode = ResampleMode::smote;
    splan.k_neighbors = 5;
    splan.seed = mix_seed(42, 8);
    const auto [Xo, yo] = smote(X, ys, splan);
    std::size_t o0 = 0, o1 = 0;
    for (std::size_t i = 0; i < yo.size(); ++i) (yo[i] ? o1 : o0) += 1;
    const bool obalanced = o0 == n_max && o1 == n_max;

    bool originals_kept = Xo.n_rows() >= X.n_rows();
    for (std::size_t i = 0; originals_kept && i < X.n_rows(); ++i) {
        if (yo[i] != ys[i]) originals_kept = false;
        const auto a = X.row(i);
        const auto b = Xo.row(i);
        for (std::size_t j = 0; j < X.n_cols(); ++j) {
            if (a[j] != b[j]) {
                originals_kept = false;
                break;
            }
        }
    }

    const std::uint8_t minority_label = n1 <= n0 ? 1 : 0;
    std::vector<std::size_t> minority;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ys[i] == minority_label) minority.push_back(i);
    }

    // brute-force k nearest minority neighbors; ties at the k-th distance
    // widen the allowed set, so any implementation-side tie break passes
    const std::size_t m = minority.size();
    const std::size_t k = splan.k_neighbors;
    std::vector<std::vector<double>> d2(m, std::vector<double>(m, 0.0));
    std::vector<double> kth(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        std::vector<double> ds;
        ds.reserve(m - 1);
        for (std::size_t b = 0; b < m; ++b) {
            if (b == a) continue;
            double s = 0.0;
            const auto ra = X.row(minority[a]);
            const auto rb = X.row(minority[b]);
            for (std::size_t j = 0; j < X.n_cols(); ++j) {
                const double dd = ra[j] - rb[j];
                s += dd * dd;
            }
            d2[a][b] = s;
            ds.push_back(s);
        }
        std::nth_element(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(k - 1), ds.end());
        kth[a] = ds[k - 1];
    }

    const double tol = 1e-9;
    const std::size_t synth_total = Xo.n_rows() - X.n_rows();
    std::size_t synth_ok = 0;
    bool synth_labels_ok = true;
    for (std::size_t s = X.n_rows(); s < Xo.n_rows(); ++s) {
        if (yo[s] != minority_label) synth_labels_ok = false;
        const auto srow = Xo.row(s);
        bool explained = false;
        for (std::size_t a = 0; a < m && !explained; ++a) {
            const auto xr = X.row(minority[a]);
            for (std::size_t b = 0; b < m && !explained; ++b) {
                if (b == a || d2[a][b] > kth[a]) continue;
                const auto zr = X.row(minority[b]);
                std::size_t jwide = 0;
                double span = 0.0;
                for (std::size_t j = 0; j < X.n_cols(); ++j) {
                    const double w = std::abs(zr[j] - xr[j]);
                    if (w > span) {
                        span = w;
                        jwide = j;
                    }
                }
                const double u =
                    span > 0.0 ? (srow[jwide] - xr[jwide]) / (zr[jwide] - xr[jwide]) : 0.0;
                if (u < -tol || u > 1.0 + tol) continue;
                bool match = true;
                for (std::size_t j = 0; j < X.n_cols(); ++j) {
                    if (std::abs(srow[j] - (xr[j] + u * (zr[j] - xr[j]))) > tol) {
                        match = false;
                        break;
                    }
                }
                explained = match;
            }
        }
        synth_ok += explained ? 1 : 0;
    }

    Outcome o;
    o.pass = pass && obalanced && originals_kept && synth_labels_ok && synth_ok == synth_total;
    o.detail = fmt(
        "%ssmote %zu/%zu%s, originals %s, %zu/%zu synthetics pass the convex k-NN oracle "
        "(tolerance 1e-9, 1000-row subsample)",
        parts.c_str(), o0, o1, obalanced ? "" : " NOT BALANCED",
        originals_kept ? "verbatim" : "NOT VERBATIM", synth_ok, synth_total);
    return o;
}

// ---------------------------------------------------------------------------
// criterion 3: metric oracles — confusion/ratio metrics vs per-element
// counting (exact), trapezoid AUC vs O(n^2) pair counting (1e-12), and
// chi-squared scores vs the hand formula (1e-10)
// ---------------------------------------------------------------------------

Outcome criterion3(Gate&) {
    Rng rng(20260818);

    const std::size_t n_vectors = 500;
    std::size_t vectors_ok = 0;
    for (std::size_t c = 0; c < n_vectors; ++c) {
        const std::size_t n = 1 + rng.bounded(200);
        LabelVector yt;
        std::vector<std::uint8_t> yp(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint8_t tv, pv;
            switch (c) { // the first cases pin the degenerate corners
                case 0: tv = 0, pv = 0; break;
                case 1: tv = 1, pv = 1; break;
                case 2: tv = 0, pv = 1; break;
                case 3: tv = 1, pv = 0; break;
                default:
                    tv = static_cast<std::uint8_t>(rng.bounded(2));
                    pv = static_cast<std::uint8_t>(rng.bounded(2));
            }
            yt.values.push_back(tv);
            yp[i] = pv;
        }
        std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (yt[i] && yp[i]) ++tp;
            else if (yt[i] && !yp[i]) ++fn;
            else if (!yt[i] && yp[i]) ++fp;
            else ++tn;
        }
        const double acc = static_cast<double>(tp + tn) / static_cast<double>(n);
        const double prec = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        const double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;

        const ConfusionMatrix cm = confusion(yt, yp);
        const BinaryMetrics bm = binary_metrics(cm);
        const bool same = cm.tp == tp && cm.tn == tn && cm.fp == fp && cm.fn == fn &&
                          bm.accuracy == acc && bm.precision == prec && bm.recall == rec &&
                          bm.f1 == f1;
        vectors_ok += same ? 1 : 0;
    }

    const std::size_t n_auc = 20;
    std::size_t auc_ok = 0;
    double worst_auc = 0.0;
    for (std::size_t f = 0; f < n_auc; ++f) {
        const std::size_t n = 300;
        LabelVector yt;
        std::vector<double> scores(n);
        const double prevalence = 0.1 + 0.8 * static_cast<double>(f) / (n_auc - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t label = rng.uniform01() < prevalence ? 1 : 0;
            double s = 0.7 * rng.uniform01() + 0.3 * label;
            if (f % 2 == 0) s = std::round(10.0 * s) / 10.0; // heavy score ties
            yt.values.push_back(label);
            scores[i] = s;
        }
        yt.values[0] = 0; // both classes are always present
        yt.values[1] = 1;

        double num = 0.0;
        std::size_t pos = 0, neg = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!yt[i]) continue;
            ++pos;
            for (std::size_t j = 0; j < n; ++j) {
                if (yt[j]) continue;
                if (scores[i] > scores[j]) num += 1.0;
                else if (scores[i] == scores[j]) num += 0.5;
            }
        }
        neg = n - pos;
        const double oracle = num / (static_cast<double>(pos) * static_cast<double>(neg));
        const RocResult rr = roc_auc(yt, scores);
        const double err = std::abs(rr.auc - oracle);
        worst_auc = std::max(worst_auc, err);
        auc_ok += err <= 1e-12 ? 1 : 0;
    }

    const std::size_t n_chi = 10;
    std::size_t chi_ok = 0;
    double worst_chi = 0.0;
    for (std::size_t f = 0; f < n_chi; ++f) {
        const std::size_t n = 200;
        const std::vector<std::string> names = {"c0", "c1", "c2", "c3", "c4", "c5"};
        FeatureMatrix X(n, names);
        LabelVector yl;
        for (std::size_t i = 0; i < n; ++i) {
            X(i, 0) = rng.uniform01();
            X(i, 1) = static_cast<double>(rng.bounded(2));
            X(i, 2) = 3.0 * rng.uniform01();
            X(i, 3) = 0.0; // zero-sum column exercises the score-0 convention
            X(i, 4) = rng.uniform01() < 0.1 ? 1.0 : 0.0;
            X(i, 5) = std::round(10.0 * rng.uniform01()) / 10.0;
            yl.values.push_back(rng.uniform01() < 0.3 ? 1 : 0);
        }
        yl.values[0] = 0;
        yl.values[1] = 1;

        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < n; ++i) n_pos += yl[i];
        const double p1 = static_cast<double>(n_pos) / static_cast<double>(n);
        const double p0 = 1.0 - p1;

        const std::vector<double> got = chi2_scores(X, yl);
        bool all_close = true;
        for (std::size_t j = 0; j < X.n_cols(); ++j) {
            double total = 0.0, obs1 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                total += X(i, j);
                if (yl[i]) obs1 += X(i, j);
            }
            double want = 0.0;
            if (total > 0.0) {
                const double obs0 = total - obs1;
                const double exp0 = p0 * total;
                const double exp1 = p1 * total;
                if (exp0 > 0.0) want += (obs0 - exp0) * (obs0 - exp0) / exp0;
                if (exp1 > 0.0) want += (obs1 - exp1) * (obs1 - exp1) / exp1;
            }
            const double err = std::abs(got[j] - want);
            worst_chi = std::max(worst_chi, err);
            all_close = all_close && err <= 1e-10;
        }
        chi_ok += all_close ? 1 : 0;
    }

    Outcome o;
    o.pass = vectors_ok == n_vectors && auc_ok == n_auc && chi_ok == n_chi;
    o.detail = fmt(
        "confusion and ratio metrics exact on %zu/%zu prediction vectors; AUC vs pair counting "
        "on %zu/%zu 300-point fixtures (worst |delta| %.1e, bound 1e-12); chi-squared vs hand "
        "formula on %zu/%zu fixtures (worst |delta| %.1e, bound 1e-10)",
        vectors_ok, n_vectors, auc_ok, n_auc, worst_auc, chi_ok, n_chi, worst_chi);
    return o;
}

// ---------------------------------------------------------------------------
// criterion 4: training numerics — analytic gradient vs central
// differences, a non-increasing boosting log-loss trace, and the boosting
// weight recurrence replayed from the serialized stumps
// ---------------------------------------------------------------------------

Outcome criterion4(Gate&) {
    Rng rng(424242);

    FeatureMatrix Xl(20, {"f0", "f1", "f2"});
    LabelVector yl;
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = 0; j < 3; ++j) Xl(i, j) = 2.0 * rng.uniform01() - 1.0;
        yl.values.push_back(rng.bounded(2) ? 1 : 0);
    }
    yl.values[0] = 0;
    yl.values[1] = 1;
    std::vector<double> w(3);
    for (double& v : w) v = rng.uniform01() - 0.5;
    const double b = rng.uniform01() - 0.5;
    const double h = 1e-6;
    double worst_rel = 0.0;
    auto rel = [](double a, double f) {
        return std::abs(a - f) / (1.0 + std::max(std::abs(a), std::abs(f)));
    };
    for (const double l2 : {0.0, 0.3}) {
        const LogregGradient gr = logreg_gradient(Xl, yl, w, b, l2);
        for (std::size_t j = 0; j < 3; ++j) {
            std::vector<double> wp = w, wm = w;
            wp[j] += h;
            wm[j] -= h;
            const double fd =
                (logreg_loss(Xl, yl, wp, b, l2) - logreg_loss(Xl, yl, wm, b, l2)) / (2.0 * h);
            worst_rel = std::max(worst_rel, rel(gr.d_weights[j], fd));
        }
        const double fdb =
            (logreg_loss(Xl, yl, w, b + h, l2) - logreg_loss(Xl, yl, w, b - h, l2)) / (2.0 * h);
        worst_rel = std::max(worst_rel, rel(gr.d_bias, fdb));
    }
    const bool grad_ok = worst_rel <= 1e-6;

    const std::size_t ng = 300;
    FeatureMatrix Xg(ng, {"g0", "g1", "g2", "g3", "g4"});
    LabelVector yg;
    for (std::size_t i = 0; i < ng; ++i) {
        for (std::size_t j = 0; j < 5; ++j) Xg(i, j) = rng.uniform01();
        bool lab = Xg(i, 0) + 0.8 * Xg(i, 1) - 0.5 * Xg(i, 2) > 0.65;
        if (rng.uniform01() < 0.10) lab = !lab; // label noise keeps every round busy
        yg.values.push_back(lab ? 1 : 0);
    }
    yg.values[0] = 0;
    yg.values[1] = 1;
    ClassifierSpec gspec;
    gspec.kind = ModelKind::gbm;
    gspec.hyperparameters = {
        {"n_estimators", 100}, {"learning_rate", 0.05}, {"max_depth", 2}, {"max_features", 2}};
    gspec.seed = 7;
    auto gbm = make_classifier(gspec);
    gbm->fit(Xg, yg);
    const std::vector<double> trace = gbm_training_logloss(*gbm);
    double worst_rise = 0.0;
    for (std::size_t t = 1; t < trace.size(); ++t) {
        worst_rise = std::max(worst_rise, trace[t] - trace[t - 1]);
    }
    const bool gbm_ok = trace.size() == 100 && worst_rise <= 1e-12;

    const std::size_t na = 200;
    FeatureMatrix Xa(na, {"a0", "a1", "a2", "a3"});
    LabelVector ya;
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < 4; ++j) Xa(i, j) = rng.uniform01();
        bool lab = Xa(i, 0) > Xa(i, 1);
        if (rng.uniform01() < 0.15) lab = !lab;
        ya.values.push_back(lab ? 1 : 0);
    }
    ya.values[0] = 0;
    ya.values[1] = 1;
    ClassifierSpec aspec;
    aspec.kind = ModelKind::adaboost;
    aspec.hyperparameters = {{"n_estimators", 50}};
    aspec.seed = 11;
    auto ada = make_classifier(aspec);
    ada->fit(Xa, ya);
    const std::vector<BoostRound> rounds = adaboost_trace(*ada);
    const nlohmann::json aj = ada->to_json();
    const nlohmann::json& stumps = aj.at("stumps");

    auto stump_vote = [](const nlohmann::json& root, std::span<const double> x) {
        const nlohmann::json* node = &root;
        while (node->contains("feature")) {
            const auto f = node->at("feature").get<std::size_t>();
            const double thr = node->at("threshold").get<double>();
            node = x[f] < thr ? &node->at("left") : &node->at("right");
        }
        return node->at("value").get<double>() >= 0.5 ? 1.0 : -1.0;
    };

    double worst_round = 0.0;
    std::vector<double> wgt(na, 1.0 / static_cast<double>(na));
    for (std::size_t t = 0; t < rounds.size(); ++t) {
        std::vector<double> votes(na);
        double eps = 0.0;
        for (std::size_t i = 0; i < na; ++i) {
            votes[i] = stump_vote(stumps.at(t), Xa.row(i));
            const double yi = ya[i] ? 1.0 : -1.0;
            if (votes[i] != yi) eps += wgt[i];
        }
        // a perfect stump is recorded with its error pinned just above zero
        const double alpha = eps == 0.0 ? 0.5 * std::log((1.0 - 1e-10) / 1e-10)
                                        : 0.5 * std::log((1.0 - eps) / eps);
        worst_round = std::max(worst_round, std::abs(eps - rounds[t].epsilon));
        worst_round = std::max(worst_round, std::abs(alpha - rounds[t].alpha));
        if (eps == 0.0) break;
        double sum = 0.0;
        for (std::size_t i = 0; i < na; ++i) {
            const double yi = ya[i] ? 1.0 : -1.0;
            wgt[i] *= std::exp(-alpha * yi * votes[i]);
            sum += wgt[i];
        }
        for (double& v : wgt) v /= sum;
    }
    const bool ada_ok = rounds.size() >= 10 && worst_round <= 1e-12;

    Outcome o;
    o.pass = grad_ok && gbm_ok && ada_ok;
    o.detail = fmt(
        "gradient vs central differences: worst relative error %.2e (bound 1e-6); boosting "
        "log-loss over %zu rounds at lr 0.05: max rise %.2e (bound 1e-12, %.4f -> %.4f); "
        "adaboost recurrence replayed over %zu rounds: worst |delta| %.2e (bound 1e-12)",
        worst_rel, trace.size(), worst_rise, trace.empty() ? 0.0 : trace.front(),
        trace.empty() ? 0.0 : trace.back(), rounds.size(), worst_round);
    return o;
}

// ---------------------------------------------------------------------------
// criterion 5: statistics — the paired t-test lands on p = 0.050 +- 0.001
// at |t| = 2.262 with 9 dof (checked against direct numerical integration
// of the t density), and stratified 10-fold keeps 90/10 in every fold
// ---------------------------------------------------------------------------

Outcome criterion5(Gate&) {
    // ten matched differences: five at mu+1, five at mu-1 give sd/sqrt(n)
    // = 1/3 exactly, so t = 3 mu; mu is chosen to land t on 2.262
    const double mu = 2.262 / 3.0;
    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(mu + (i % 2 == 0 ? 1.0 : -1.0));
        b.push_back(0.0);
    }
    const TTestResult tt = paired_t_test(a, b);

    const double nu = 9.0;
    const double coeff =
        std::tgamma((nu + 1.0) / 2.0) / (std::sqrt(nu * M_PI) * std::tgamma(nu / 2.0));
    auto pdf = [&](double x) { return coeff * std::pow(1.0 + x * x / nu, -(nu + 1.0) / 2.0); };
    const double lo = std::abs(tt.t);
    const double hi = 60.0; // the tail beyond 60 is ~5e-13, inside the budget
    const std::size_t steps = 200000;
    const double dx = (hi - lo) / static_cast<double>(steps);
    double simpson = pdf(lo) + pdf(hi);
    for (std::size_t i = 1; i < steps; ++i) {
        simpson += pdf(lo + dx * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    }
    const double p_oracle = 2.0 * simpson * dx / 3.0;

    const bool t_ok = std::abs(tt.t - 2.262) <= 1e-9 && tt.df == 9;
    const bool p_ok = std::abs(tt.p - p_oracle) <= 1e-9 && std::abs(tt.p - 0.050) <= 0.001;

    LabelVector labels;
    for (std::size_t i = 0; i < 1000; ++i) labels.values.push_back(i % 10 == 3 ? 1 : 0);
    const FoldPlan plan = stratified_kfold(labels, 10, 2026);
    bool folds_ok = plan.fold_of.size() == 1000;
    std::size_t zeros[10] = {0}, ones[10] = {0};
    for (std::size_t i = 0; i < plan.fold_of.size() && folds_ok; ++i) {
        const std::size_t f = plan.fold_of[i];
        if (f >= 10) {
            folds_ok = false;
            break;
        }
        (labels[i] ? ones[f] : zeros[f]) += 1;
    }
    for (std::size_t f = 0; f < 10 && folds_ok; ++f) {
        folds_ok = zeros[f] == 90 && ones[f] == 10;
    }

    Outcome o;
    o.pass = t_ok && p_ok && folds_ok;
    o.detail = fmt(
        "paired t = %.6f (df %zu), p = %.6f vs integration oracle %.6f (|delta| %.1e, bound "
        "1e-9; band 0.050 +- 0.001); stratified 10-fold on 900/100 labels: %s",
        tt.t, tt.df, tt.p, p_oracle, std::abs(tt.p - p_oracle),
        folds_ok ? "every fold holds exactly 90/10" : "FOLD COUNTS WRONG");
    return o;
}

// ---------------------------------------------------------------------------
// criterion 6: overfitting reproduction — an unlimited-depth tree on the
// oversampled training arm memorizes (>= 0.99 train accuracy) while the
// holdout trails by at least 5 percentage points; 20k-row subsample
// ---------------------------------------------------------------------------

Outcome criterion6(Gate& g) {
    if (!g.table) return {false, "skipped: the dataset did not load in criterion 1", {}};
    const auto t0 = Clock::now();
    const Table& t = *g.table;
    const LabelVector y = t.labels();

    Rng rng(mix_seed(42, 9));
    const std::size_t want = std::min<std::size_t>(20000, t.n_rows());
    const std::vector<std::size_t> sub = rng.sample_without_replacement(t.n_rows(), want);
    const LabelVector ys = y.take_rows(sub);
    const SplitPair sp = split_holdout(sub.size(), ys, 0.75, mix_seed(42, 10));

    std::vector<std::size_t> fit_rows;
    fit_rows.reserve(sp.train_indices.size());
    for (const std::size_t i : sp.train_indices) fit_rows.push_back(sub[i]);

    PipelineModel::FitConfig fc;
    fc.drop = {"RISK_MM"};
    const PipelineModel pipe = PipelineModel::fit(t, fit_rows, fc);
    const FeatureMatrix Xs = pipe.apply(t).take_rows(sub);

    ResamplePlan plan;
    plan.mode = ResampleMode::smote;
    plan.k_neighbors = 5;
    plan.seed = mix_seed(42, 11);
    const auto [Xb, yb] =
        apply_resample(Xs.take_rows(sp.train_indices), ys.take_rows(sp.train_indices), plan);

    ClassifierSpec spec;
    spec.kind = ModelKind::tree;
    spec.hyperparameters = {{"max_depth", 0}, {"min_samples_split", 2}};
    auto tree = make_classifier(spec);
    tree->fit(Xb, yb);

    const double train_acc = accuracy_of(tree->predict(Xb), yb);
    const double hold_acc =
        accuracy_of(tree->predict(Xs.take_rows(sp.test_indices)), ys.take_rows(sp.test_indices));
    const double secs = seconds_since(t0);

    Outcome o;
    o.pass = train_acc >= 0.99 && train_acc - hold_acc >= 0.05 && secs < 120.0;
    o.detail = fmt(
        "unlimited-depth tree on the oversampled arm: train accuracy %.4f (bound >= 0.99), "
        "holdout %.4f, gap %.1f pp (bound >= 5 pp); %zu-row subsample done in %.1f s (bound 120 s)",
        train_acc, hold_acc, 100.0 * (train_acc - hold_acc), want, secs);
    return o;
}

// ---------------------------------------------------------------------------
// criterion 7 (qualitative, reported but never asserted): cross-validated
// rankings on the original and undersampled arms, next to the reference
// front-runner expectations the presets carry
// ---------------------------------------------------------------------------

Outcome criterion7(Gate& g) {
    Outcome o;
    o.pass = true;
    o.detail = "rankings reported below for comparison; this check is informational";
    struct Arm {
        int preset;
        const char* label;
        const char* expected;
    };
    const Arm arms[] = {{1, "original arm", "gbm_lr25"}, {2, "undersampled arm", "logreg"}};
    for (const Arm& arm : arms) {
        const fs::path dir = g.scratch / ("ranking_arm" + std::to_string(arm.preset));
        const ExperimentConfig cfg =
            make_preset(arm.preset, g.data_csv.string(), 42, dir.string());
        const auto t0 = Clock::now();
        const ExperimentResult r = run_experiment(cfg);
        const double secs = seconds_since(t0);
        std::string order;
        for (std::size_t i = 0; i < r.ranking.size(); ++i) {
            if (i) order += " > ";
            order += r.ranking[i];
        }
        const std::string front = r.ranking.empty() ? "(none)" : r.ranking[0];
        o.extra_lines.push_back(fmt("%s (%.0f s): expected front-runner %s, observed %s (%s)",
                                    arm.label, secs, arm.expected, front.c_str(),
                                    front == arm.expected ? "matches" : "differs"));
        o.extra_lines.push_back(fmt("  CV-mean-accuracy ranking: %s", order.c_str()));
    }
    return o;
}

// ---------------------------------------------------------------------------
// criterion 8: end-to-end determinism through the CLI — the same preset and
// seed twice gives a byte-identical metrics.csv, inside the runtime bound
// ---------------------------------------------------------------------------

Outcome criterion8(Gate& g) {
    const fs::path d1 = g.scratch / "determinism_run1";
    const fs::path d2 = g.scratch / "determinism_run2";
    auto run_once = [&](const fs::path& out) {
        const std::string cmd = "\"" + g.cli_bin.string() + "\" run --preset experiment2 --data \"" +
                                g.data_csv.string() + "\" --seed 42 --out \"" + out.string() +
                                "\" > /dev/null 2>&1";
        const auto t0 = Clock::now();
        const int rc = std::system(cmd.c_str());
        return std::make_pair(rc, seconds_since(t0));
    };
    const auto [rc1, s1] = run_once(d1);
    const auto [rc2, s2] = run_once(d2);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string m1 = slurp(d1 / "metrics.csv");
    const std::string m2 = slurp(d2 / "metrics.csv");
    const bool ran = rc1 == 0 && rc2 == 0;
    const bool identical = ran && !m1.empty() && m1 == m2;

    const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
    // the bound is stated for 4 cores; a wall time under it on fewer cores
    // satisfies it a fortiori, more is an honest failure here
    const bool time_ok = std::max(s1, s2) < 600.0;

    Outcome o;
    o.pass = ran && identical && time_ok;
    o.detail = fmt(
        "preset experiment2, seed 42, twice through the CLI: metrics.csv %s (%zu bytes); "
        "runs took %.0f s and %.0f s on %u core(s) (bound 600 s on 4 cores)",
        ran ? (identical ? "byte-identical" : "DIFFERS") : "MISSING (run failed)", m1.size(), s1,
        s2, cores);
    return o;
}

} // namespace

int main(int argc, char** argv) {
    Gate g;
    g.scratch = fs::temp_directory_path() / ("rainpipe_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(g.scratch);
    g.cli_bin = RAINPIPE_BIN;

    const char* env = std::getenv("RAINPIPE_WEATHER_CSV");
    if (argc > 1) {
        g.data_csv = argv[1];
        g.data_desc = "command-line dataset";
    } else if (env != nullptr && *env != '\0') {
        g.data_csv = env;
        g.data_desc = "dataset named by RAINPIPE_WEATHER_CSV";
    } else {
        g.data_csv = g.scratch / "weather_replica.csv";
        const auto t0 = Clock::now();
        synth::write_weather_csv(g.data_csv, synth::WeatherSynthConfig{});
        std::printf("generated the synthetic replica in %.1f s\n", seconds_since(t0));
        g.data_desc = "synthetic replica, default generator settings";
    }
    std::printf("release criteria gate\ndata: %s (%s)\n\n", g.data_csv.string().c_str(),
                g.data_desc.c_str());
    std::fflush(stdout);

    struct Criterion {
        int num;
        const char* title;
        std::function<Outcome(Gate&)> fn;
    };
    const std::vector<Criterion> criteria = {
        {1, "dataset facts", criterion1},
        {2, "resampling properties", criterion2},
        {3, "metric oracles", criterion3},
        {4, "training numerics", criterion4},
        {5, "statistics", criterion5},
        {6, "overfitting reproduction", criterion6},
        {7, "qualitative rankings", criterion7},
        {8, "CLI determinism and runtime", criterion8},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        try {
            o = c.fn(g);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("unexpected exception: ") + e.what();
        }
        std::printf("criterion %d (%s): %s - %s\n", c.num, c.title, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str());
        for (const std::string& line : o.extra_lines) std::printf("    %s\n", line.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }

    std::printf("\n%s: %d of 8 criteria passed\n", failed == 0 ? "ACCEPTED" : "REJECTED",
                8 - failed);
    std::error_code ec;
    fs::remove_all(g.scratch, ec);
    return failed == 0 ? 0 : 1;
}
