// Hyperparameter selection: deterministic grid enumeration, stratified
// k-fold cross-validation, and the three-step protocol (fit on train,
// score on dev, refit on train+dev, score on devtest).
#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentikit/ensemble.hpp"
#include "sentikit/pipeline.hpp"

namespace sentikit::select {

struct GridPoint {
    double alpha = 1.0;
    double lambda = 1e-3;
    uint32_t hash_dim = 1u << 18;

    std::string describe() const {
        std::ostringstream os;
        os << "alpha=" << alpha << " lambda=" << lambda << " hash_dim=" << hash_dim;
        return os.str();
    }
};

// Cartesian enumeration with axes sorted ascending first, so the result is
// invariant to the order values were listed in.
inline std::vector<GridPoint> enumerate_grid(const cfg::Grid& grid) {
    if (grid.alphas.empty() || grid.lambdas.empty() || grid.hash_dims.empty())
        throw DataError("grid axes must be non-empty");
    auto alphas = grid.alphas;
    auto lambdas = grid.lambdas;
    auto dims = grid.hash_dims;
    std::sort(alphas.begin(), alphas.end());
    std::sort(lambdas.begin(), lambdas.end());
    std::sort(dims.begin(), dims.end());
    std::vector<GridPoint> points;
    for (double d : dims)
        for (double a : alphas)
            for (double l : lambdas)
                points.push_back({a, l, static_cast<uint32_t>(d)});
    return points;
}

struct ConfigResult {
    GridPoint config;
    double cv_mean = 0.0;
    std::vector<double> fold_scores;
    std::optional<double> dev;      // step-2 score
    std::optional<double> devtest;  // step-3 score
    bool devtest_skipped = false;
    size_t step1_fit_size = 0;      // samples fitted in step 1 (train)
    size_t step3_fit_size = 0;      // samples refitted in step 3 (train + dev)
};

struct ValidationReport {
    std::vector<ConfigResult> rows;
    size_t chosen = 0;
    cfg::Measure measure = cfg::Measure::accuracy;
    std::string selection_rule;
};

namespace detail {

struct PreparedSplit {
    std::vector<feat::FeatureBundle> bundles;
    std::vector<std::string> labels;
    std::vector<std::string> topics;
};

inline PreparedSplit prepare_split(const corpus::Dataset& ds, const cfg::RunConfig& rc,
                                   const feat::Resources& res) {
    std::map<std::string, std::vector<std::string>> pos_tags;
    const std::map<std::string, std::vector<std::string>>* tags_ptr = nullptr;
    if (rc.features.pos && rc.paths.pos_tags) {
        pos_tags = pipeline::load_pos_tags(*rc.paths.pos_tags);
        tags_ptr = &pos_tags;
    }
    auto prepared = pipeline::prepare(ds, res, tags_ptr);
    PreparedSplit out;
    out.bundles = pipeline::extract_bundles(prepared, rc.features, res, rc.jobs);
    out.labels = ds.labels();
    out.topics = pipeline::dataset_topics(ds);
    return out;
}

inline cfg::RunConfig apply_point(const cfg::RunConfig& base, const GridPoint& pt) {
    cfg::RunConfig rc = base;
    rc.vectorize.alpha = pt.alpha;
    rc.vectorize.hash.dim = pt.hash_dim;
    rc.model.lambda = pt.lambda;
    return rc;
}

// Fit vectorizer and single model on the indexed subset, return predictions
// for the complement subset.
inline double eval_point(const cfg::RunConfig& rc, const PreparedSplit& data,
                         const std::vector<size_t>& train_idx, const std::vector<size_t>& test_idx) {
    std::vector<feat::FeatureBundle> tr_bundles;
    std::vector<std::string> tr_y;
    tr_bundles.reserve(train_idx.size());
    for (size_t i : train_idx) {
        tr_bundles.push_back(data.bundles[i]);
        tr_y.push_back(data.labels[i]);
    }
    vec::Vectorizer v(rc.vectorize);
    v.fit(tr_bundles);
    std::vector<SparseVec> X(tr_bundles.size());
    parallel_for(tr_bundles.size(), rc.jobs, [&](size_t i) { X[i] = v.transform(tr_bundles[i]); });
    auto model = pipeline::train_single(rc, X, tr_y, v.total_dim());

    std::vector<std::string> gold, pred, topics;
    for (size_t i : test_idx) {
        gold.push_back(data.labels[i]);
        topics.push_back(data.topics[i]);
        pred.push_back(model.predict(v.transform(data.bundles[i])));
    }
    return pipeline::compute_measure(rc.measure, gold, pred, rc.classes(),
                                     rc.measure == cfg::Measure::kld ? &topics : nullptr);
}

inline bool better(double a, double b, bool maximize) { return maximize ? a > b : a < b; }

}  // namespace detail

// Stratified k-fold cross-validation of every grid point over the training
// set; `chosen` is the best CV mean, ties resolved by enumeration order.
inline ValidationReport grid_search(const corpus::Dataset& train, const cfg::Grid& grid,
                                    const cfg::RunConfig& base, const feat::Resources& res,
                                    int k = 5, uint64_t seed = 42) {
    auto points = enumerate_grid(grid);
    auto data = detail::prepare_split(train, base, res);
    auto folds = stack::stratified_folds(data.labels, k, seed);

    std::vector<std::vector<size_t>> fold_train(k), fold_test(k);
    for (size_t i = 0; i < data.labels.size(); ++i) {
        for (int f = 0; f < k; ++f)
            (folds.fold[i] == f ? fold_test[f] : fold_train[f]).push_back(i);
    }
    for (int f = 0; f < k; ++f) {
        std::set<std::string> present;
        for (size_t i : fold_train[f]) present.insert(data.labels[i]);
        for (const auto& c : base.classes())
            if (!present.count(c))
                throw DataError("cross-validation fold " + std::to_string(f) + " is missing class '" + c +
                                "'; reduce the fold count or reseed");
    }

    ValidationReport report;
    report.measure = base.measure;
    report.selection_rule = "best cross-validation mean";
    report.rows.resize(points.size());
    const bool maximize = cfg::measure_maximizes(base.measure);

    // (config, fold) cells are independent; flatten for the worker pool.
    std::vector<std::vector<double>> scores(points.size(), std::vector<double>(k, 0.0));
    parallel_for(points.size() * static_cast<size_t>(k), base.jobs, [&](size_t cell) {
        size_t p = cell / static_cast<size_t>(k);
        int f = static_cast<int>(cell % static_cast<size_t>(k));
        cfg::RunConfig rc = detail::apply_point(base, points[p]);
        rc.jobs = 1;
        scores[p][f] = detail::eval_point(rc, data, fold_train[f], fold_test[f]);
    });

    for (size_t p = 0; p < points.size(); ++p) {
        ConfigResult& row = report.rows[p];
        row.config = points[p];
        row.fold_scores = scores[p];
        double sum = 0.0;
        for (double s : scores[p]) sum += s;
        row.cv_mean = sum / static_cast<double>(k);
        if (p > 0 && detail::better(row.cv_mean, report.rows[report.chosen].cv_mean, maximize))
            report.chosen = p;
    }
    return report;
}

// Step 1: fit on train. Step 2: score on dev. Step 3: refit on train+dev,
// score on devtest (skipped with a notice when devtest is empty). The id
// audit rejects splits that share records.
inline ConfigResult three_step_validate(const corpus::Dataset& train, const corpus::Dataset& dev,
                                        const corpus::Dataset& devtest, const cfg::RunConfig& rc,
                                        const feat::Resources& res) {
    std::set<std::string> ids;
    for (const auto& r : train.records) ids.insert(r.id);
    for (const auto& r : dev.records)
        if (!ids.insert(r.id).second) throw DataError("id '" + r.id + "' appears in both train and dev");
    for (const auto& r : devtest.records)
        if (!ids.insert(r.id).second)
            throw DataError("id '" + r.id + "' appears in devtest and an earlier split");

    ConfigResult row;
    row.config = {rc.vectorize.alpha, rc.model.lambda, rc.vectorize.hash.dim};

    auto tr = detail::prepare_split(train, rc, res);
    auto dv = detail::prepare_split(dev, rc, res);

    auto fit_and_score = [&](const detail::PreparedSplit& fit_on, const detail::PreparedSplit& score_on) {
        vec::Vectorizer v(rc.vectorize);
        v.fit(fit_on.bundles);
        std::vector<SparseVec> X(fit_on.bundles.size());
        parallel_for(fit_on.bundles.size(), rc.jobs,
                     [&](size_t i) { X[i] = v.transform(fit_on.bundles[i]); });
        auto model = pipeline::train_single(rc, X, fit_on.labels, v.total_dim());
        std::vector<std::string> pred;
        pred.reserve(score_on.bundles.size());
        for (const auto& fb : score_on.bundles) pred.push_back(model.predict(v.transform(fb)));
        return pipeline::compute_measure(rc.measure, score_on.labels, pred, rc.classes(),
                                         rc.measure == cfg::Measure::kld ? &score_on.topics : nullptr);
    };

    row.step1_fit_size = tr.labels.size();
    row.dev = fit_and_score(tr, dv);

    if (devtest.records.empty()) {
        row.devtest_skipped = true;
        return row;
    }
    detail::PreparedSplit merged;
    merged.bundles = tr.bundles;
    merged.labels = tr.labels;
    merged.topics = tr.topics;
    merged.bundles.insert(merged.bundles.end(), dv.bundles.begin(), dv.bundles.end());
    merged.labels.insert(merged.labels.end(), dv.labels.begin(), dv.labels.end());
    merged.topics.insert(merged.topics.end(), dv.topics.begin(), dv.topics.end());
    auto dt = detail::prepare_split(devtest, rc, res);
    row.step3_fit_size = merged.labels.size();
    row.devtest = fit_and_score(merged, dt);
    return row;
}

// Grid search plus, when dev/devtest splits are supplied, the three-step
// scores per config. With both extra scores present the chosen config is
// the one with the best mean of the step-2 and step-3 scores; otherwise
// the best cross-validation mean.
inline ValidationReport validate_grid(const corpus::Dataset& train,
                                      const corpus::Dataset* dev, const corpus::Dataset* devtest,
                                      const cfg::Grid& grid, const cfg::RunConfig& base,
                                      const feat::Resources& res, int k = 5, uint64_t seed = 42) {
    ValidationReport report = grid_search(train, grid, base, res, k, seed);
    if (!dev) return report;
    const bool maximize = cfg::measure_maximizes(base.measure);
    corpus::Dataset empty;
    empty.schema = train.schema;
    bool use_combined = devtest && !devtest->records.empty();
    for (size_t p = 0; p < report.rows.size(); ++p) {
        cfg::RunConfig rc = detail::apply_point(base, report.rows[p].config);
        auto step = three_step_validate(train, *dev, devtest ? *devtest : empty, rc, res);
        report.rows[p].dev = step.dev;
        report.rows[p].devtest = step.devtest;
        report.rows[p].devtest_skipped = step.devtest_skipped;
    }
    auto key = [&](const ConfigResult& r) {
        if (use_combined && r.dev && r.devtest) return (*r.dev + *r.devtest) / 2.0;
        return r.dev ? *r.dev : r.cv_mean;
    };
    report.selection_rule = use_combined ? "best mean of dev and devtest scores" : "best dev score";
    report.chosen = 0;
    for (size_t p = 1; p < report.rows.size(); ++p)
        if (detail::better(key(report.rows[p]), key(report.rows[report.chosen]), maximize))
            report.chosen = p;
    return report;
}

// ---- report output ---------------------------------------------------------

inline void write_report_tsv(const ValidationReport& report, std::ostream& out) {
    out << "alpha\tlambda\thash_dim\tcv_mean\tdev\tdevtest\tchosen\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    for (size_t p = 0; p < report.rows.size(); ++p) {
        const auto& r = report.rows[p];
        out << r.config.alpha << '\t' << r.config.lambda << '\t' << r.config.hash_dim << '\t'
            << fmt(r.cv_mean) << '\t' << (r.dev ? fmt(*r.dev) : "-") << '\t'
            << (r.devtest ? fmt(*r.devtest) : "-") << '\t' << (p == report.chosen ? "*" : "") << '\n';
    }
}

inline void write_report_json(const ValidationReport& report, std::ostream& out) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json row;
        row["alpha"] = r.config.alpha;
        row["lambda"] = r.config.lambda;
        row["hash_dim"] = r.config.hash_dim;
        row["cv_mean"] = r.cv_mean;
        row["fold_scores"] = r.fold_scores;
        if (r.dev) row["dev"] = *r.dev;
        if (r.devtest) row["devtest"] = *r.devtest;
        if (r.devtest_skipped) row["devtest_skipped"] = true;
        rows.push_back(row);
    }
    nlohmann::json j;
    j["measure"] = cfg::measure_name(report.measure);
    j["selection_rule"] = report.selection_rule;
    j["chosen"] = report.chosen;
    j["rows"] = rows;
    out << j.dump(2) << "\n";
}

}  // namespace sentikit::select
