// The four official task measures (PN-restricted macro F1, macro-averaged
// recall, macro-averaged MAE, smoothed KLD) plus classify-and-count
// prevalence estimation.
#pragma once

#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "sentikit/common.hpp"

namespace sentikit::eval {

struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<int64_t>> counts;  // [gold][predicted]

    static ConfusionMatrix from(const std::vector<std::string>& gold,
                                const std::vector<std::string>& pred,
                                const std::vector<std::string>& classes) {
        if (gold.size() != pred.size()) throw DataError("gold/prediction length mismatch");
        ConfusionMatrix cm;
        cm.classes = classes;
        cm.counts.assign(classes.size(), std::vector<int64_t>(classes.size(), 0));
        std::map<std::string, size_t> index;
        for (size_t c = 0; c < classes.size(); ++c) index[classes[c]] = c;
        for (size_t i = 0; i < gold.size(); ++i) {
            auto g = index.find(gold[i]);
            auto p = index.find(pred[i]);
            if (g == index.end()) throw DataError("unknown gold label '" + gold[i] + "'");
            if (p == index.end()) throw DataError("unknown predicted label '" + pred[i] + "'");
            ++cm.counts[g->second][p->second];
        }
        return cm;
    }

    int64_t total() const {
        int64_t t = 0;
        for (const auto& row : counts)
            for (int64_t v : row) t += v;
        return t;
    }

    double accuracy() const {
        int64_t t = total();
        if (t == 0) return 0.0;
        int64_t correct = 0;
        for (size_t c = 0; c < classes.size(); ++c) correct += counts[c][c];
        return static_cast<double>(correct) / static_cast<double>(t);
    }

    size_t index_of(const std::string& cls) const {
        for (size_t c = 0; c < classes.size(); ++c)
            if (classes[c] == cls) return c;
        throw DataError("class '" + cls + "' not in confusion matrix");
    }

    double precision(size_t c) const {
        int64_t tp = counts[c][c], pred = 0;
        for (size_t g = 0; g < classes.size(); ++g) pred += counts[g][c];
        return pred == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(pred);
    }

    double recall(size_t c) const {
        int64_t tp = counts[c][c], gold = 0;
        for (size_t p = 0; p < classes.size(); ++p) gold += counts[c][p];
        return gold == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gold);
    }

    double f1(size_t c) const {
        double p = precision(c), r = recall(c);
        return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }
};

// Macro F1 over the positive and negative classes only; neutral errors
// affect the score only through their impact on P/N precision and recall.
inline double f1_pn(const ConfusionMatrix& cm) {
    return 0.5 * (cm.f1(cm.index_of("positive")) + cm.f1(cm.index_of("negative")));
}

// Macro-averaged recall over the two classes of a binary problem.
inline double macro_recall(const ConfusionMatrix& cm) {
    if (cm.classes.size() != 2) throw DataError("macro_recall expects a binary confusion matrix");
    double sum = 0.0;
    for (size_t c = 0; c < 2; ++c) {
        int64_t gold = cm.counts[c][0] + cm.counts[c][1];
        if (gold == 0)
            std::cerr << "warning: gold class '" << cm.classes[c] << "' is empty; recall counted as 0\n";
        sum += cm.recall(c);
    }
    return sum / 2.0;
}

// Macro-averaged mean absolute error over the gold-present classes of an
// ordinal (integer) scale.
inline double mae_macro(const std::vector<int>& gold, const std::vector<int>& pred) {
    if (gold.size() != pred.size()) throw DataError("gold/prediction length mismatch");
    if (gold.empty()) throw DataError("mae_macro: empty input");
    std::map<int, std::pair<double, size_t>> per_class;  // class -> (abs error sum, count)
    for (size_t i = 0; i < gold.size(); ++i) {
        auto& [err, n] = per_class[gold[i]];
        err += std::abs(pred[i] - gold[i]);
        ++n;
    }
    double sum = 0.0;
    for (const auto& [cls, acc] : per_class) sum += acc.first / static_cast<double>(acc.second);
    return sum / static_cast<double>(per_class.size());
}

struct Prevalence {
    std::map<std::string, double> p;
};

// Smoothed Kullback-Leibler divergence in nats. Both distributions are
// smoothed with eps = 1/(2 * test_size):  p_s = (p + eps) / (1 + |C| eps).
inline double kld_smoothed(const Prevalence& truth, const Prevalence& estimate, size_t test_size) {
    if (test_size < 1) throw DataError("kld_smoothed: test_size must be >= 1");
    if (truth.p.size() != estimate.p.size()) throw DataError("kld_smoothed: class sets differ");
    const double eps = 1.0 / (2.0 * static_cast<double>(test_size));
    const double denom = 1.0 + static_cast<double>(truth.p.size()) * eps;
    double kld = 0.0;
    for (const auto& [cls, pt] : truth.p) {
        auto it = estimate.p.find(cls);
        if (it == estimate.p.end()) throw DataError("kld_smoothed: class '" + cls + "' missing from estimate");
        double ps = (pt + eps) / denom;
        double qs = (it->second + eps) / denom;
        kld += ps * std::log(ps / qs);
    }
    return kld;
}

inline Prevalence prevalence_from_labels(const std::vector<std::string>& labels,
                                         const std::vector<std::string>& classes) {
    if (labels.empty()) throw DataError("prevalence of an empty group is undefined");
    Prevalence prev;
    for (const auto& c : classes) prev.p[c] = 0.0;
    for (const auto& l : labels) {
        auto it = prev.p.find(l);
        if (it == prev.p.end()) throw DataError("label '" + l + "' not in class list");
        it->second += 1.0;
    }
    for (auto& [c, v] : prev.p) v /= static_cast<double>(labels.size());
    return prev;
}

// Classify and count: predict every item of the group, report the
// fraction per class.
inline Prevalence classify_and_count(const std::function<std::string(const SparseVec&)>& classify,
                                     const std::vector<SparseVec>& group,
                                     const std::vector<std::string>& classes) {
    if (group.empty()) throw DataError("classify_and_count: empty topic group");
    std::vector<std::string> preds;
    preds.reserve(group.size());
    for (const auto& x : group) preds.push_back(classify(x));
    return prevalence_from_labels(preds, classes);
}

}  // namespace sentikit::eval
