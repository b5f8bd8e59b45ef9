// Score-to-probability calibration: Platt's sigmoid fit with smoothed
// targets, isotonic regression by pool-adjacent-violators, and the
// per-class one-vs-rest adaptation with renormalization for multiclass
// models.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sentikit/common.hpp"
#include "sentikit/linear.hpp"

namespace sentikit::cal {

enum class Method { platt, isotonic, native };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::platt: return "platt";
        case Method::isotonic: return "isotonic";
        case Method::native: return "native";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    if (s == "platt") return Method::platt;
    if (s == "isotonic") return Method::isotonic;
    if (s == "native") return Method::native;
    throw DataError("unknown calibration method: " + std::string(s));
}

// p(f) = 1 / (1 + exp(a*f + b)); a is negative when higher scores mean
// higher positive likelihood on the calibration data.
struct PlattParams {
    double a = 0.0;
    double b = 0.0;

    double operator()(double f) const {
        double z = a * f + b;
        return 1.0 / (1.0 + std::exp(z));
    }
};

// Newton fit of the Platt sigmoid, maximizing the Bernoulli likelihood of
// the smoothed targets t+ = (N+ + 1)/(N+ + 2) and t- = 1/(N- + 2).
inline PlattParams platt_fit(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw DataError("platt_fit: score/label size mismatch");
    size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("platt_fit: both classes must be present in the calibration data");
    for (double s : scores)
        if (!std::isfinite(s)) throw DataError("platt_fit: non-finite score");

    const size_t n = scores.size();
    const double hi = (static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0);
    const double lo = 1.0 / (static_cast<double>(n_neg) + 2.0);
    std::vector<double> target(n);
    for (size_t i = 0; i < n; ++i) target[i] = labels[i] ? hi : lo;

    double a = 0.0;
    double b = std::log((static_cast<double>(n_neg) + 1.0) / (static_cast<double>(n_pos) + 1.0));

    auto objective = [&](double pa, double pb) {
        double f = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double z = pa * scores[i] + pb;
            // t*z + log(1+exp(-z)), computed in the stable branch
            if (z >= 0)
                f += target[i] * z + num::log1pexp(-z);
            else
                f += (target[i] - 1.0) * z + num::log1pexp(z);
        }
        return f;
    };

    const double sigma = 1e-12;
    struct Derivs {
        double g1, g2, h11, h22, h21, gn;
    };
    auto derivs = [&](double pa, double pb) {
        Derivs d{0.0, 0.0, sigma, sigma, 0.0, 0.0};
        for (size_t i = 0; i < n; ++i) {
            double z = pa * scores[i] + pb;
            double p, q;  // p = P(y=1|f), q = 1-p
            if (z >= 0) {
                double e = std::exp(-z);
                p = e / (1.0 + e);
                q = 1.0 / (1.0 + e);
            } else {
                double e = std::exp(z);
                p = 1.0 / (1.0 + e);
                q = e / (1.0 + e);
            }
            double d1 = target[i] - p;
            double d2 = p * q;
            d.g1 += scores[i] * d1;
            d.g2 += d1;
            d.h11 += scores[i] * scores[i] * d2;
            d.h22 += d2;
            d.h21 += scores[i] * d2;
        }
        d.gn = std::sqrt(d.g1 * d.g1 + d.g2 * d.g2);
        return d;
    };

    double fval = objective(a, b);
    Derivs d = derivs(a, b);
    for (int iter = 0; iter < 200; ++iter) {
        if (d.gn < 1e-10) break;
        double det = d.h11 * d.h22 - d.h21 * d.h21;
        double da = -(d.h22 * d.g1 - d.h21 * d.g2) / det;
        double db = -(-d.h21 * d.g1 + d.h11 * d.g2) / det;
        double gd = d.g1 * da + d.g2 * db;
        double step = 1.0;
        bool accepted = false;
        while (step >= 1e-10) {
            double na = a + step * da, nb = b + step * db;
            double nf = objective(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if (accepted) {
            d = derivs(a, b);
            continue;
        }
        // Near the optimum the remaining objective decrease drops below
        // double resolution before the gradient does; undamped Newton steps
        // still contract the gradient, so fall back on that.
        Derivs nd = derivs(a + da, b + db);
        if (nd.gn < d.gn) {
            a += da;
            b += db;
            fval = objective(a, b);
            d = nd;
            continue;
        }
        break;
    }
    if (d.gn >= 1e-8)
        throw ConvergenceError("platt_fit did not converge (gradient norm " + std::to_string(d.gn) + ")",
                               d.gn);
    return {a, b};
}

// Weighted pool-adjacent-violators: the non-decreasing sequence minimizing
// weighted squared error to `values`. Returns the fitted value per input.
inline std::vector<double> pav_fit(const std::vector<double>& values, std::vector<double> weights = {}) {
    if (values.empty()) return {};
    if (weights.empty()) weights.assign(values.size(), 1.0);
    if (weights.size() != values.size()) throw DataError("pav_fit: weight size mismatch");
    struct Block {
        double mean, weight;
        size_t count;
    };
    std::vector<Block> blocks;
    for (size_t i = 0; i < values.size(); ++i) {
        blocks.push_back({values[i], weights[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean >= blocks.back().mean) {
            Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            double w = a.weight + b.weight;
            a.mean = (a.mean * a.weight + b.mean * b.weight) / w;
            a.weight = w;
            a.count += b.count;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
    return out;
}

// Non-decreasing score -> probability map. Evaluation interpolates
// linearly between breakpoints and clamps outside the observed range.
struct IsotonicMap {
    std::vector<double> x;  // strictly increasing scores
    std::vector<double> y;  // non-decreasing probabilities in [0, 1]

    double operator()(double f) const {
        if (x.empty()) return 0.0;
        if (f <= x.front()) return y.front();
        if (f >= x.back()) return y.back();
        size_t hi = static_cast<size_t>(std::upper_bound(x.begin(), x.end(), f) - x.begin());
        size_t lo = hi - 1;
        double t = (f - x[lo]) / (x[hi] - x[lo]);
        return y[lo] + t * (y[hi] - y[lo]);
    }
};

inline IsotonicMap isotonic_fit(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.size() < 2)
        throw DataError("isotonic_fit: need at least two (score, label) pairs");
    bool has_pos = false, has_neg = false;
    for (int l : labels) (l ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw DataError("isotonic_fit: both classes must be present in the calibration data");

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return scores[i] < scores[j]; });

    // pre-pool ties on the score axis
    std::vector<double> xs, vals, ws;
    for (size_t k = 0; k < order.size();) {
        size_t j = k;
        double sum = 0.0;
        while (j < order.size() && scores[order[j]] == scores[order[k]]) {
            sum += labels[order[j]] ? 1.0 : 0.0;
            ++j;
        }
        xs.push_back(scores[order[k]]);
        vals.push_back(sum / static_cast<double>(j - k));
        ws.push_back(static_cast<double>(j - k));
        k = j;
    }

    auto fitted = pav_fit(vals, ws);
    IsotonicMap map;
    map.x = std::move(xs);
    map.y = std::move(fitted);
    for (double& v : map.y) v = std::clamp(v, 0.0, 1.0);
    return map;
}

// A linear model plus per-class score-to-probability maps. Outputs are
// renormalized to the simplex; an all-zero calibrated row falls back to
// the uniform distribution.
struct CalibratedModel {
    linear::LinearModel base;
    Method method = Method::native;
    std::vector<PlattParams> platt;     // per class when method == platt
    std::vector<IsotonicMap> isotonic;  // per class when method == isotonic

    std::vector<double> predict_proba(const SparseVec& x) const {
        if (method == Method::native) return base.predict_proba(x);
        auto s = base.decision(x);
        std::vector<double> p(s.size());
        for (size_t c = 0; c < s.size(); ++c)
            p[c] = method == Method::platt ? platt[c](s[c]) : isotonic[c](s[c]);
        double sum = 0.0;
        for (double v : p) sum += v;
        if (sum <= 0.0) {
            std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
            return p;
        }
        for (double& v : p) v /= sum;
        return p;
    }

    const std::string& predict(const SparseVec& x) const {
        auto p = predict_proba(x);
        size_t best = 0;
        for (size_t c = 1; c < p.size(); ++c)
            if (p[c] > p[best]) best = c;
        return base.classes[best];
    }
};

// Fits one binary calibrator per class on held-out decision scores
// (one row of `oof_scores` per sample, one column per class).
inline CalibratedModel calibrate_multiclass(linear::LinearModel base, Method method,
                                            const std::vector<std::vector<double>>& oof_scores,
                                            const std::vector<std::string>& labels) {
    CalibratedModel cm;
    cm.base = std::move(base);
    cm.method = method;
    if (method == Method::native) return cm;
    if (oof_scores.size() != labels.size() || labels.empty())
        throw DataError("calibrate_multiclass: score/label size mismatch");
    const size_t n_classes = cm.base.classes.size();
    for (const auto& row : oof_scores)
        if (row.size() != n_classes) throw DataError("calibrate_multiclass: score row width mismatch");

    for (size_t c = 0; c < n_classes; ++c) {
        std::vector<double> s(labels.size());
        std::vector<int> t(labels.size());
        size_t members = 0;
        for (size_t i = 0; i < labels.size(); ++i) {
            s[i] = oof_scores[i][c];
            t[i] = labels[i] == cm.base.classes[c] ? 1 : 0;
            members += t[i];
        }
        if (members == 0)
            throw DataError("calibrate_multiclass: class '" + cm.base.classes[c] +
                            "' missing from calibration labels");
        if (method == Method::platt)
            cm.platt.push_back(platt_fit(s, t));
        else
            cm.isotonic.push_back(isotonic_fit(s, t));
    }
    return cm;
}

}  // namespace sentikit::cal
