// Regularized linear classifiers: logistic regression (one-vs-rest and
// multinomial) and linear SVMs (one-vs-rest hinge and the joint multiclass
// hinge), trained by batch minimization of the stated convex objectives,
// with inverse-frequency class weighting.
//
// Objective, shared by all losses:
//     f(W, b) = (1/N) sum_i cw(y_i) * loss_i  +  lambda * ||W||^2
// The bias is unregularized. Feature indices never seen in the training
// data keep weight zero, so models store only the active columns.
#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sentikit/common.hpp"
#include "sentikit/optimize.hpp"

namespace sentikit::linear {

enum class Loss { logistic, hinge, crammer_singer, multinomial };

inline std::string loss_name(Loss l) {
    switch (l) {
        case Loss::logistic: return "logistic";
        case Loss::hinge: return "hinge";
        case Loss::crammer_singer: return "crammer_singer";
        case Loss::multinomial: return "multinomial";
    }
    return "?";
}

inline Loss parse_loss(std::string_view s) {
    if (s == "logistic") return Loss::logistic;
    if (s == "hinge") return Loss::hinge;
    if (s == "crammer_singer") return Loss::crammer_singer;
    if (s == "multinomial") return Loss::multinomial;
    throw DataError("unknown loss: " + std::string(s));
}

struct ClassWeights {
    std::map<std::string, double> weights;

    double at(const std::string& cls) const {
        auto it = weights.find(cls);
        return it == weights.end() ? 1.0 : it->second;
    }

    static ClassWeights uniform() { return {}; }
};

// weight(c) = N / (C * n_c): the weighted empirical class masses n_c * w_c
// are equal across classes and sum to N.
inline ClassWeights balanced_weights(const std::vector<std::string>& labels,
                                     const std::vector<std::string>* classes = nullptr) {
    if (labels.empty()) throw DataError("balanced_weights: empty label list");
    std::map<std::string, size_t> counts;
    for (const auto& l : labels) ++counts[l];
    std::vector<std::string> cls;
    if (classes) {
        cls = *classes;
        for (const auto& c : cls)
            if (!counts.count(c)) throw DataError("balanced_weights: class '" + c + "' has no samples");
    } else {
        for (const auto& [c, n] : counts) cls.push_back(c);
    }
    ClassWeights cw;
    const double n = static_cast<double>(labels.size());
    const double k = static_cast<double>(cls.size());
    for (const auto& c : cls) cw.weights[c] = n / (k * static_cast<double>(counts[c]));
    return cw;
}

// ---- compact training view -------------------------------------------------

// CSR matrix over the remapped active columns of a sparse sample set.
struct Encoded {
    std::vector<size_t> row_ptr;   // N + 1
    std::vector<uint32_t> col;     // compact column ids
    std::vector<double> val;
    std::vector<uint32_t> active;  // sorted original indices; active[compact] = original
    size_t n_rows = 0;
    size_t n_cols = 0;
};

inline Encoded encode(const std::vector<SparseVec>& X) {
    Encoded e;
    e.n_rows = X.size();
    std::set<uint32_t> seen;
    for (const auto& x : X)
        for (const auto& [i, v] : x.entries) seen.insert(i);
    e.active.assign(seen.begin(), seen.end());
    e.n_cols = e.active.size();
    std::map<uint32_t, uint32_t> remap;
    for (uint32_t j = 0; j < e.active.size(); ++j) remap[e.active[j]] = j;
    e.row_ptr.push_back(0);
    for (const auto& x : X) {
        for (const auto& [i, v] : x.entries) {
            e.col.push_back(remap[i]);
            e.val.push_back(v);
        }
        e.row_ptr.push_back(e.col.size());
    }
    return e;
}

// ---- objectives -------------------------------------------------------------

// Binary problem over targets in {-1, +1}; parameters are [w (n_cols), b].
class BinaryObjective : public optim::ObjectiveFunction {
public:
    enum class Kind { logistic, hinge };

    BinaryObjective(Kind kind, const Encoded& data, std::vector<double> targets,
                    std::vector<double> sample_weight, double lambda)
        : kind_(kind), data_(data), t_(std::move(targets)), sw_(std::move(sample_weight)), lambda_(lambda) {
        if (t_.size() != data_.n_rows) throw DataError("target size mismatch");
        if (sw_.empty()) sw_.assign(data_.n_rows, 1.0);
    }

    size_t size() const override { return data_.n_cols + 1; }

    double value_and_grad(const std::vector<double>& x, std::vector<double>& grad) const override {
        const size_t n = data_.n_cols;
        grad.assign(n + 1, 0.0);
        const double inv_n = 1.0 / static_cast<double>(data_.n_rows);
        double loss = 0.0;
        for (size_t i = 0; i < data_.n_rows; ++i) {
            double s = x[n];
            for (size_t k = data_.row_ptr[i]; k < data_.row_ptr[i + 1]; ++k)
                s += x[data_.col[k]] * data_.val[k];
            double coeff = 0.0;
            if (kind_ == Kind::logistic) {
                double z = t_[i] * s;
                loss += sw_[i] * num::log1pexp(-z);
                coeff = -sw_[i] * t_[i] * num::sigmoid(-z);
            } else {
                double margin = 1.0 - t_[i] * s;
                if (margin > 0) {
                    loss += sw_[i] * margin;
                    coeff = -sw_[i] * t_[i];
                }
            }
            if (coeff != 0.0) {
                double c = coeff * inv_n;
                for (size_t k = data_.row_ptr[i]; k < data_.row_ptr[i + 1]; ++k)
                    grad[data_.col[k]] += c * data_.val[k];
                grad[n] += c;
            }
        }
        double obj = loss * inv_n;
        for (size_t j = 0; j < n; ++j) {
            obj += lambda_ * x[j] * x[j];
            grad[j] += 2.0 * lambda_ * x[j];
        }
        return obj;
    }

private:
    Kind kind_;
    const Encoded& data_;
    std::vector<double> t_;
    std::vector<double> sw_;
    double lambda_;
};

// Joint multiclass problem; parameters are [W_0 .. W_{C-1} (n_cols each), b (C)].
class JointObjective : public optim::ObjectiveFunction {
public:
    enum class Kind { multinomial, crammer_singer };

    JointObjective(Kind kind, const Encoded& data, std::vector<int> y, int n_classes,
                   std::vector<double> sample_weight, double lambda)
        : kind_(kind), data_(data), y_(std::move(y)), c_(n_classes), sw_(std::move(sample_weight)),
          lambda_(lambda) {
        if (y_.size() != data_.n_rows) throw DataError("label size mismatch");
        if (sw_.empty()) sw_.assign(data_.n_rows, 1.0);
    }

    size_t size() const override { return static_cast<size_t>(c_) * data_.n_cols + c_; }

    double value_and_grad(const std::vector<double>& x, std::vector<double>& grad) const override {
        const size_t n = data_.n_cols;
        const size_t bias_at = static_cast<size_t>(c_) * n;
        grad.assign(size(), 0.0);
        const double inv_n = 1.0 / static_cast<double>(data_.n_rows);
        double loss = 0.0;
        std::vector<double> scores(c_), dscore(c_);
        for (size_t i = 0; i < data_.n_rows; ++i) {
            for (int c = 0; c < c_; ++c) {
                double s = x[bias_at + c];
                const size_t base = static_cast<size_t>(c) * n;
                for (size_t k = data_.row_ptr[i]; k < data_.row_ptr[i + 1]; ++k)
                    s += x[base + data_.col[k]] * data_.val[k];
                scores[c] = s;
            }
            std::fill(dscore.begin(), dscore.end(), 0.0);
            const int yi = y_[i];
            if (kind_ == Kind::multinomial) {
                double mx = *std::max_element(scores.begin(), scores.end());
                double sum = 0.0;
                for (int c = 0; c < c_; ++c) sum += std::exp(scores[c] - mx);
                double lse = mx + std::log(sum);
                loss += sw_[i] * (lse - scores[yi]);
                for (int c = 0; c < c_; ++c)
                    dscore[c] = sw_[i] * (std::exp(scores[c] - lse) - (c == yi ? 1.0 : 0.0));
            } else {
                int rival = -1;
                for (int c = 0; c < c_; ++c) {
                    if (c == yi) continue;
                    if (rival < 0 || scores[c] > scores[rival]) rival = c;
                }
                if (rival >= 0) {
                    double margin = 1.0 + scores[rival] - scores[yi];
                    if (margin > 0) {
                        loss += sw_[i] * margin;
                        dscore[rival] = sw_[i];
                        dscore[yi] = -sw_[i];
                    }
                }
            }
            for (int c = 0; c < c_; ++c) {
                if (dscore[c] == 0.0) continue;
                double coeff = dscore[c] * inv_n;
                const size_t base = static_cast<size_t>(c) * n;
                for (size_t k = data_.row_ptr[i]; k < data_.row_ptr[i + 1]; ++k)
                    grad[base + data_.col[k]] += coeff * data_.val[k];
                grad[bias_at + c] += coeff;
            }
        }
        double obj = loss * inv_n;
        for (size_t j = 0; j < bias_at; ++j) {
            obj += lambda_ * x[j] * x[j];
            grad[j] += 2.0 * lambda_ * x[j];
        }
        return obj;
    }

private:
    Kind kind_;
    const Encoded& data_;
    std::vector<int> y_;
    int c_;
    std::vector<double> sw_;
    double lambda_;
};

// ---- model -------------------------------------------------------------------

struct TrainInfo {
    struct Sub {
        std::string name;
        int iterations = 0;
        double objective = 0.0;
        double grad_norm = 0.0;
        std::vector<double> trace;
    };
    std::vector<Sub> subproblems;
};

struct TrainOptions {
    double tol = 1e-6;     // relative objective change
    int max_iter = 1000;
    int jobs = 1;
};

struct LinearModel {
    std::vector<std::string> classes;
    Loss loss = Loss::logistic;
    double lambda = 1.0;
    size_t dim = 0;
    std::vector<uint32_t> support;             // sorted original feature indices
    std::vector<std::vector<double>> weights;  // [class][support index]
    std::vector<double> bias;                  // [class]

    size_t n_classes() const { return classes.size(); }

    std::vector<double> decision(const SparseVec& x) const {
        std::vector<double> s = bias;
        for (const auto& [i, v] : x.entries) {
            if (i >= dim)
                throw DataError("feature index " + std::to_string(i) + " out of range for model dim " +
                                std::to_string(dim));
            auto it = std::lower_bound(support.begin(), support.end(), i);
            if (it == support.end() || *it != i) continue;
            size_t j = static_cast<size_t>(it - support.begin());
            for (size_t c = 0; c < weights.size(); ++c) s[c] += weights[c][j] * v;
        }
        return s;
    }

    // Argmax with ties broken by class declaration order.
    size_t predict_index(const SparseVec& x) const {
        auto s = decision(x);
        size_t best = 0;
        for (size_t c = 1; c < s.size(); ++c)
            if (s[c] > s[best]) best = c;
        return best;
    }

    const std::string& predict(const SparseVec& x) const { return classes[predict_index(x)]; }

    // Native probabilities: per-class sigmoids renormalized for one-vs-rest
    // logistic models, softmax for multinomial ones.
    std::vector<double> predict_proba(const SparseVec& x) const {
        if (loss == Loss::hinge || loss == Loss::crammer_singer)
            throw UsageError("SVM scores are not probabilities; calibrate the model first "
                             "(see calibrate.hpp)");
        auto s = decision(x);
        std::vector<double> p(s.size());
        if (loss == Loss::logistic) {
            double sum = 0.0;
            for (size_t c = 0; c < s.size(); ++c) {
                p[c] = num::sigmoid(s[c]);
                sum += p[c];
            }
            for (double& v : p) v /= sum;
        } else {
            double mx = *std::max_element(s.begin(), s.end());
            double sum = 0.0;
            for (size_t c = 0; c < s.size(); ++c) {
                p[c] = std::exp(s[c] - mx);
                sum += p[c];
            }
            for (double& v : p) v /= sum;
        }
        return p;
    }
};

namespace detail {

inline std::vector<std::string> infer_classes(const std::vector<std::string>& y) {
    std::set<std::string> s(y.begin(), y.end());
    return {s.begin(), s.end()};
}

inline std::vector<int> class_indices(const std::vector<std::string>& y,
                                      const std::vector<std::string>& classes) {
    std::map<std::string, int> index;
    for (size_t c = 0; c < classes.size(); ++c) index[classes[c]] = static_cast<int>(c);
    std::vector<int> out(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
        auto it = index.find(y[i]);
        if (it == index.end()) throw DataError("label '" + y[i] + "' not in class list");
        out[i] = it->second;
    }
    return out;
}

inline std::vector<double> sample_weights(const std::vector<std::string>& y, const ClassWeights* cw) {
    std::vector<double> sw(y.size(), 1.0);
    if (cw)
        for (size_t i = 0; i < y.size(); ++i) sw[i] = cw->at(y[i]);
    return sw;
}

inline void check_converged(const optim::MinimizeResult& r, const std::string& what) {
    if (!r.converged)
        throw ConvergenceError(what + " did not converge within iteration budget (final gradient norm " +
                                   std::to_string(r.grad_norm) + ")",
                               r.grad_norm);
}

// Spreads the compact solution back onto (support, per-class weight rows).
inline void unpack_joint(const Encoded& data, const std::vector<double>& theta, size_t n_classes,
                         LinearModel& model) {
    model.support = data.active;
    model.weights.assign(n_classes, std::vector<double>(data.n_cols, 0.0));
    model.bias.assign(n_classes, 0.0);
    const size_t n = data.n_cols;
    for (size_t c = 0; c < n_classes; ++c) {
        for (size_t j = 0; j < n; ++j) model.weights[c][j] = theta[c * n + j];
        model.bias[c] = theta[n_classes * n + c];
    }
}

}  // namespace detail

enum class Mode { ovr, multinomial, crammer_singer };

namespace detail {

inline LinearModel train_ovr(BinaryObjective::Kind kind, Loss loss, const std::vector<SparseVec>& X,
                             const std::vector<std::string>& y, double lambda,
                             const std::vector<std::string>& classes, const ClassWeights* cw,
                             size_t dim, const TrainOptions& opts, TrainInfo* info) {
    Encoded data = encode(X);
    auto yi = class_indices(y, classes);
    auto sw = sample_weights(y, cw);
    LinearModel model;
    model.classes = classes;
    model.loss = loss;
    model.lambda = lambda;
    model.dim = dim;
    model.support = data.active;
    model.weights.assign(classes.size(), std::vector<double>(data.n_cols, 0.0));
    model.bias.assign(classes.size(), 0.0);
    std::vector<optim::MinimizeResult> results(classes.size());
    parallel_for(classes.size(), opts.jobs, [&](size_t c) {
        std::vector<double> targets(y.size());
        for (size_t i = 0; i < y.size(); ++i) targets[i] = yi[i] == static_cast<int>(c) ? 1.0 : -1.0;
        BinaryObjective obj(kind, data, std::move(targets), sw, lambda);
        optim::MinimizeOptions mo;
        mo.max_iter = opts.max_iter;
        mo.rel_tol = opts.tol;
        results[c] = optim::minimize(obj, std::vector<double>(obj.size(), 0.0), mo);
    });
    for (size_t c = 0; c < classes.size(); ++c) {
        detail::check_converged(results[c], loss_name(loss) + " one-vs-rest class '" + classes[c] + "'");
        for (size_t j = 0; j < data.n_cols; ++j) model.weights[c][j] = results[c].x[j];
        model.bias[c] = results[c].x[data.n_cols];
        if (info)
            info->subproblems.push_back({classes[c], results[c].iterations, results[c].fx,
                                          results[c].grad_norm, results[c].trace});
    }
    return model;
}

inline LinearModel train_joint(JointObjective::Kind kind, Loss loss, const std::vector<SparseVec>& X,
                               const std::vector<std::string>& y, double lambda,
                               const std::vector<std::string>& classes, const ClassWeights* cw,
                               size_t dim, const TrainOptions& opts, TrainInfo* info) {
    Encoded data = encode(X);
    JointObjective obj(kind, data, class_indices(y, classes), static_cast<int>(classes.size()),
                       sample_weights(y, cw), lambda);
    optim::MinimizeOptions mo;
    mo.max_iter = opts.max_iter;
    mo.rel_tol = opts.tol;
    auto result = optim::minimize(obj, std::vector<double>(obj.size(), 0.0), mo);
    detail::check_converged(result, loss_name(loss));
    LinearModel model;
    model.classes = classes;
    model.loss = loss;
    model.lambda = lambda;
    model.dim = dim;
    detail::unpack_joint(data, result.x, classes.size(), model);
    if (info)
        info->subproblems.push_back({loss_name(loss), result.iterations, result.fx, result.grad_norm,
                                      result.trace});
    return model;
}

inline size_t infer_dim(const std::vector<SparseVec>& X) {
    size_t dim = 0;
    for (const auto& x : X)
        for (const auto& [i, v] : x.entries) dim = std::max(dim, static_cast<size_t>(i) + 1);
    return dim;
}

}  // namespace detail

// Logistic regression; `mode` selects independent per-class sigmoid fits
// (ovr) or a joint softmax fit (multinomial).
inline LinearModel train_logreg(const std::vector<SparseVec>& X, const std::vector<std::string>& y,
                                double lambda, Mode mode, const ClassWeights* cw = nullptr,
                                const std::vector<std::string>* classes = nullptr,
                                const TrainOptions& opts = {}, TrainInfo* info = nullptr,
                                size_t dim = 0) {
    if (X.size() != y.size() || X.empty()) throw DataError("training data size mismatch");
    if (lambda <= 0) throw DataError("lambda must be positive");
    auto cls = classes ? *classes : detail::infer_classes(y);
    if (cls.size() < 2) throw DataError("need at least two classes");
    if (dim == 0) dim = detail::infer_dim(X);
    if (mode == Mode::crammer_singer) throw UsageError("crammer_singer is an SVM mode");
    if (mode == Mode::multinomial)
        return detail::train_joint(JointObjective::Kind::multinomial, Loss::multinomial, X, y, lambda,
                                   cls, cw, dim, opts, info);
    return detail::train_ovr(BinaryObjective::Kind::logistic, Loss::logistic, X, y, lambda, cls, cw, dim,
                             opts, info);
}

// Linear SVM; `mode` selects per-class hinge fits (ovr) or the joint
// multiclass hinge (crammer_singer).
inline LinearModel train_svm(const std::vector<SparseVec>& X, const std::vector<std::string>& y,
                             double lambda, Mode mode, const ClassWeights* cw = nullptr,
                             const std::vector<std::string>* classes = nullptr,
                             const TrainOptions& opts = {}, TrainInfo* info = nullptr, size_t dim = 0) {
    if (X.size() != y.size() || X.empty()) throw DataError("training data size mismatch");
    if (lambda <= 0) throw DataError("lambda must be positive");
    auto cls = classes ? *classes : detail::infer_classes(y);
    if (cls.size() < 2) throw DataError("need at least two classes");
    if (dim == 0) dim = detail::infer_dim(X);
    if (mode == Mode::multinomial) throw UsageError("multinomial is a logistic-regression mode");
    if (mode == Mode::crammer_singer)
        return detail::train_joint(JointObjective::Kind::crammer_singer, Loss::crammer_singer, X, y,
                                   lambda, cls, cw, dim, opts, info);
    return detail::train_ovr(BinaryObjective::Kind::hinge, Loss::hinge, X, y, lambda, cls, cw, dim, opts,
                             info);
}

}  // namespace sentikit::linear
