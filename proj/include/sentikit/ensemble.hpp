// Stacked generalization: leakage-free out-of-fold probability generation
// for the four base learners and a joint multiclass hinge meta-classifier
// over their concatenated outputs.
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sentikit/calibrate.hpp"
#include "sentikit/common.hpp"
#include "sentikit/linear.hpp"

namespace sentikit::stack {

// One base learner configuration (a row of the base-model table).
struct BaseSpec {
    std::string id;
    linear::Loss loss = linear::Loss::crammer_singer;
    cal::Method method = cal::Method::native;  // how scores become probabilities
    double lambda = 1e-3;
    bool balanced = true;
};

// The four default base learners: joint-hinge SVM with isotonic and with
// Platt calibration, one-vs-rest logistic and multinomial logistic with
// native probabilities.
inline std::vector<BaseSpec> default_base_specs(double lambda = 1e-3) {
    return {
        {"svm_cs_isotonic", linear::Loss::crammer_singer, cal::Method::isotonic, lambda, true},
        {"svm_cs_platt", linear::Loss::crammer_singer, cal::Method::platt, lambda, true},
        {"logreg_ovr", linear::Loss::logistic, cal::Method::native, lambda, true},
        {"logreg_multinomial", linear::Loss::multinomial, cal::Method::native, lambda, true},
    };
}

struct FoldAssignment {
    std::vector<int> fold;  // per-sample fold id in [0, k)
    int k = 0;
};

// Stratified k-fold assignment: indices are grouped by class, shuffled with
// the seeded engine, and dealt round-robin, so per-fold class counts differ
// by at most one from perfect proportionality.
inline FoldAssignment stratified_folds(const std::vector<std::string>& y, int k, uint64_t seed) {
    if (k < 2) throw DataError("stratified_folds: need k >= 2");
    if (y.empty()) throw DataError("stratified_folds: empty label list");
    FoldAssignment fa;
    fa.k = k;
    fa.fold.assign(y.size(), -1);
    std::map<std::string, std::vector<size_t>> by_class;
    for (size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
    auto eng = rng::make_engine(seed);
    int start = 0;
    for (auto& [cls, idx] : by_class) {
        rng::shuffle(idx, eng);
        for (size_t j = 0; j < idx.size(); ++j)
            fa.fold[idx[j]] = static_cast<int>((start + j) % static_cast<size_t>(k));
        // rotate the dealing origin so leftover samples spread across folds
        start = static_cast<int>((start + idx.size()) % static_cast<size_t>(k));
    }
    return fa;
}

namespace detail {

inline linear::LinearModel train_base(const BaseSpec& spec, const std::vector<SparseVec>& X,
                                      const std::vector<std::string>& y,
                                      const std::vector<std::string>& classes, size_t dim,
                                      const linear::TrainOptions& opts) {
    linear::ClassWeights cw;
    if (spec.balanced) cw = linear::balanced_weights(y, &classes);
    const linear::ClassWeights* cwp = spec.balanced ? &cw : nullptr;
    switch (spec.loss) {
        case linear::Loss::crammer_singer:
            return linear::train_svm(X, y, spec.lambda, linear::Mode::crammer_singer, cwp, &classes, opts,
                                     nullptr, dim);
        case linear::Loss::hinge:
            return linear::train_svm(X, y, spec.lambda, linear::Mode::ovr, cwp, &classes, opts, nullptr, dim);
        case linear::Loss::logistic:
            return linear::train_logreg(X, y, spec.lambda, linear::Mode::ovr, cwp, &classes, opts, nullptr,
                                        dim);
        case linear::Loss::multinomial:
            return linear::train_logreg(X, y, spec.lambda, linear::Mode::multinomial, cwp, &classes, opts,
                                        nullptr, dim);
    }
    throw DataError("unreachable base loss");
}

inline void check_all_classes(const std::vector<std::string>& y, const std::vector<std::string>& classes,
                              const std::string& context) {
    std::map<std::string, size_t> counts;
    for (const auto& l : y) ++counts[l];
    for (const auto& c : classes)
        if (!counts.count(c))
            throw DataError(context + " is missing class '" + c + "'; reduce the fold count or reseed");
}

inline std::vector<size_t> fold_members(const FoldAssignment& fa, int fold) {
    std::vector<size_t> out;
    for (size_t i = 0; i < fa.fold.size(); ++i)
        if (fa.fold[i] == fold) out.push_back(i);
    return out;
}

}  // namespace detail

// Fits a base learner with leakage-free calibration: per-class calibrators
// are fit on out-of-fold decision scores from an internal k-fold, then the
// base model itself is refit on the full data.
inline cal::CalibratedModel fit_calibrated(const std::vector<SparseVec>& X,
                                           const std::vector<std::string>& y, const BaseSpec& spec,
                                           const std::vector<std::string>& classes, size_t dim, int k,
                                           uint64_t seed, const linear::TrainOptions& opts = {}) {
    if (spec.method == cal::Method::native) {
        cal::CalibratedModel cm;
        cm.base = detail::train_base(spec, X, y, classes, dim, opts);
        cm.method = cal::Method::native;
        return cm;
    }
    FoldAssignment fa = stratified_folds(y, k, seed);
    std::vector<std::vector<double>> oof_scores(X.size());
    for (int f = 0; f < k; ++f) {
        std::vector<SparseVec> tr_x;
        std::vector<std::string> tr_y;
        for (size_t i = 0; i < X.size(); ++i) {
            if (fa.fold[i] != f) {
                tr_x.push_back(X[i]);
                tr_y.push_back(y[i]);
            }
        }
        detail::check_all_classes(tr_y, classes, "calibration fold " + std::to_string(f) + " training set");
        auto model = detail::train_base(spec, tr_x, tr_y, classes, dim, opts);
        for (size_t i = 0; i < X.size(); ++i)
            if (fa.fold[i] == f) oof_scores[i] = model.decision(X[i]);
    }
    auto base = detail::train_base(spec, X, y, classes, dim, opts);
    return cal::calibrate_multiclass(std::move(base), spec.method, oof_scores, y);
}

struct OofResult {
    std::vector<std::vector<double>> probs;  // one probability row per sample
    FoldAssignment folds;                    // bookkeeping for leakage audits
};

// Row i holds the probability vector produced for sample i by a base model
// trained on the k-1 folds that exclude i. Calibrated bases calibrate
// inside each fold's training portion, so no row ever sees its own sample.
inline OofResult oof_probabilities(const std::vector<SparseVec>& X, const std::vector<std::string>& y,
                                   const BaseSpec& spec, const FoldAssignment& folds, uint64_t seed,
                                   const std::vector<std::string>& classes, size_t dim,
                                   const linear::TrainOptions& opts = {}) {
    if (X.size() != y.size() || X.empty()) throw DataError("oof_probabilities: data size mismatch");
    if (folds.fold.size() != X.size()) throw DataError("oof_probabilities: fold assignment size mismatch");
    OofResult res;
    res.folds = folds;
    res.probs.assign(X.size(), {});
    for (int f = 0; f < folds.k; ++f) {
        std::vector<SparseVec> tr_x;
        std::vector<std::string> tr_y;
        for (size_t i = 0; i < X.size(); ++i) {
            if (res.folds.fold[i] != f) {
                tr_x.push_back(X[i]);
                tr_y.push_back(y[i]);
            }
        }
        detail::check_all_classes(tr_y, classes, "fold " + std::to_string(f) + " training set");
        auto model = fit_calibrated(tr_x, tr_y, spec, classes, dim, folds.k, seed + 9176 + f, opts);
        for (size_t i = 0; i < X.size(); ++i)
            if (res.folds.fold[i] == f) res.probs[i] = model.predict_proba(X[i]);
    }
    return res;
}

inline OofResult oof_probabilities(const std::vector<SparseVec>& X, const std::vector<std::string>& y,
                                   const BaseSpec& spec, int k, uint64_t seed,
                                   const std::vector<std::string>& classes, size_t dim,
                                   const linear::TrainOptions& opts = {}) {
    return oof_probabilities(X, y, spec, stratified_folds(y, k, seed), seed, classes, dim, opts);
}

struct StackedModel {
    std::vector<BaseSpec> specs;
    std::vector<cal::CalibratedModel> bases;  // refit on the full training data
    linear::LinearModel meta;
    int folds = 5;
    uint64_t seed = 0;

    std::vector<double> meta_input(const SparseVec& x) const {
        std::vector<double> row;
        for (const auto& b : bases) {
            auto p = b.predict_proba(x);
            row.insert(row.end(), p.begin(), p.end());
        }
        return row;
    }

    const std::string& predict(const SparseVec& x) const {
        auto row = meta_input(x);
        SparseVec v;
        for (size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0.0) v.push(static_cast<uint32_t>(j), row[j]);
        return meta.predict(v);
    }
};

// Scoring callback for meta-regularisation selection; higher is better.
using Scorer = std::function<double(const std::vector<std::string>& gold,
                                    const std::vector<std::string>& pred)>;

inline double accuracy_scorer(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
    size_t correct = 0;
    for (size_t i = 0; i < gold.size(); ++i) correct += gold[i] == pred[i];
    return gold.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold.size());
}

namespace detail {

inline std::vector<SparseVec> rows_to_sparse(const std::vector<std::vector<double>>& rows) {
    std::vector<SparseVec> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        SparseVec v;
        for (size_t j = 0; j < r.size(); ++j)
            if (r[j] != 0.0) v.push(static_cast<uint32_t>(j), r[j]);
        out.push_back(std::move(v));
    }
    return out;
}

// Nested cross-validation over the out-of-fold matrix to pick the meta
// regularization strength; ties go to the first grid value.
inline double select_meta_lambda(const std::vector<SparseVec>& Z, const std::vector<std::string>& y,
                                 const std::vector<std::string>& classes, size_t meta_dim,
                                 const std::vector<double>& grid, int k, uint64_t seed,
                                 const Scorer& scorer, const linear::TrainOptions& opts) {
    if (grid.empty()) throw DataError("meta lambda grid is empty");
    if (grid.size() == 1) return grid[0];
    FoldAssignment fa = stratified_folds(y, k, seed);
    double best_score = 0.0;
    double best_lambda = grid[0];
    bool first = true;
    for (double lambda : grid) {
        std::vector<std::string> gold, pred;
        for (int f = 0; f < k; ++f) {
            std::vector<SparseVec> tr_x;
            std::vector<std::string> tr_y;
            for (size_t i = 0; i < Z.size(); ++i) {
                if (fa.fold[i] != f) {
                    tr_x.push_back(Z[i]);
                    tr_y.push_back(y[i]);
                }
            }
            check_all_classes(tr_y, classes, "meta fold " + std::to_string(f) + " training set");
            auto cw = linear::balanced_weights(tr_y, &classes);
            auto m = linear::train_svm(tr_x, tr_y, lambda, linear::Mode::crammer_singer, &cw, &classes,
                                       opts, nullptr, meta_dim);
            for (size_t i = 0; i < Z.size(); ++i) {
                if (fa.fold[i] == f) {
                    gold.push_back(y[i]);
                    pred.push_back(m.predict(Z[i]));
                }
            }
        }
        double score = scorer(gold, pred);
        if (first || score > best_score) {
            best_score = score;
            best_lambda = lambda;
            first = false;
        }
    }
    return best_lambda;
}

}  // namespace detail

struct StackOptions {
    int folds = 5;
    uint64_t seed = 42;
    std::vector<double> meta_lambda_grid = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
    Scorer scorer = accuracy_scorer;
    linear::TrainOptions train;
    int jobs = 1;
};

// Trains the stack: out-of-fold probabilities per base feed a joint-hinge
// meta SVM with balanced class weights; bases are then refit on the full
// training data for inference.
inline StackedModel train_stack(const std::vector<SparseVec>& X, const std::vector<std::string>& y,
                                const std::vector<BaseSpec>& specs,
                                const std::vector<std::string>& classes, size_t dim,
                                const StackOptions& opts = {}) {
    if (specs.empty()) throw DataError("train_stack: need at least one base spec");
    StackedModel sm;
    sm.specs = specs;
    sm.folds = opts.folds;
    sm.seed = opts.seed;

    const size_t n_classes = classes.size();
    std::vector<std::vector<std::vector<double>>> per_base(specs.size());
    parallel_for(specs.size(), opts.jobs, [&](size_t b) {
        per_base[b] = oof_probabilities(X, y, specs[b], opts.folds, opts.seed, classes, dim, opts.train).probs;
    });

    std::vector<std::vector<double>> meta_rows(X.size());
    for (size_t i = 0; i < X.size(); ++i) {
        meta_rows[i].reserve(specs.size() * n_classes);
        for (size_t b = 0; b < specs.size(); ++b)
            meta_rows[i].insert(meta_rows[i].end(), per_base[b][i].begin(), per_base[b][i].end());
    }
    auto Z = detail::rows_to_sparse(meta_rows);
    const size_t meta_dim = specs.size() * n_classes;

    double meta_lambda = detail::select_meta_lambda(Z, y, classes, meta_dim, opts.meta_lambda_grid,
                                                    opts.folds, opts.seed + 7321, opts.scorer, opts.train);
    auto cw = linear::balanced_weights(y, &classes);
    sm.meta = linear::train_svm(Z, y, meta_lambda, linear::Mode::crammer_singer, &cw, &classes, opts.train,
                                nullptr, meta_dim);

    sm.bases.reserve(specs.size());
    std::vector<cal::CalibratedModel> refit(specs.size());
    parallel_for(specs.size(), opts.jobs, [&](size_t b) {
        refit[b] = fit_calibrated(X, y, specs[b], classes, dim, opts.folds, opts.seed + 51329, opts.train);
    });
    for (auto& m : refit) sm.bases.push_back(std::move(m));
    return sm;
}

inline const std::string& stack_predict(const StackedModel& sm, const SparseVec& x) { return sm.predict(x); }

}  // namespace sentikit::stack
