#include <catch2/catch_amalgamated.hpp>

#include <climits>
#include <map>
#include <set>

#include "sentikit/ensemble.hpp"
#include "support/synthetic.hpp"

using namespace sentikit;

TEST_CASE("stratified folds partition the data with balanced class ratios") {
    auto eng = rng::make_engine(1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> y;
        int n_classes = 2 + rng::bounded(eng, 3);
        for (int c = 0; c < n_classes; ++c) {
            size_t count = 10 + rng::bounded(eng, 30);
            for (size_t i = 0; i < count; ++i) y.push_back("c" + std::to_string(c));
        }
        rng::shuffle(y, eng);
        int k = 2 + rng::bounded(eng, 4);
        auto fa = stack::stratified_folds(y, k, trial);
        REQUIRE(fa.fold.size() == y.size());
        // every sample assigned to exactly one fold in range
        for (int f : fa.fold) {
            CHECK(f >= 0);
            CHECK(f < k);
        }
        // per-class fold counts differ by at most one
        std::map<std::string, std::map<int, int>> counts;
        for (size_t i = 0; i < y.size(); ++i) ++counts[y[i]][fa.fold[i]];
        for (const auto& [cls, per_fold] : counts) {
            int lo = INT_MAX, hi = 0;
            for (int f = 0; f < k; ++f) {
                auto it = per_fold.find(f);
                int c = it == per_fold.end() ? 0 : it->second;
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            CHECK(hi - lo <= 1);
        }
    }
}

TEST_CASE("leave-one-out on four samples trains without the held-out row") {
    std::vector<SparseVec> X(4);
    std::vector<std::string> y;
    for (int i = 0; i < 4; ++i) {
        X[i].push(0, i < 2 ? 1.0 : -1.0);
        X[i].push(1, static_cast<double>(i));
        y.push_back(i < 2 ? "a" : "b");
    }
    stack::BaseSpec spec{"lr", linear::Loss::logistic, cal::Method::native, 1e-2, false};
    auto oof = stack::oof_probabilities(X, y, spec, 4, 5, {"a", "b"}, 2);
    // each fold holds exactly one sample
    std::set<int> folds(oof.folds.fold.begin(), oof.folds.fold.end());
    CHECK(folds.size() == 4);
    for (const auto& row : oof.probs) {
        REQUIRE(row.size() == 2);
        CHECK(row[0] + row[1] == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("out-of-fold rows lie on the simplex") {
    std::vector<SparseVec> X;
    std::vector<std::string> y;
    synth::make_blobs(20, 3, 3, 1.5, X, y);
    for (auto method : {cal::Method::native, cal::Method::platt, cal::Method::isotonic}) {
        stack::BaseSpec spec{"b", method == cal::Method::native ? linear::Loss::multinomial
                                                                 : linear::Loss::crammer_singer,
                             method, 1e-2, true};
        auto oof = stack::oof_probabilities(X, y, spec, 5, 11, {"c0", "c1", "c2"}, 2);
        for (const auto& row : oof.probs) {
            REQUIRE(row.size() == 3);
            double sum = 0;
            for (double p : row) {
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
                sum += p;
            }
            CHECK(sum == Catch::Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("no-leakage audit: every row comes from a model that never saw it") {
    std::vector<SparseVec> X;
    std::vector<std::string> y;
    synth::make_blobs(12, 3, 21, 1.0, X, y);
    std::vector<std::string> classes{"c0", "c1", "c2"};
    stack::BaseSpec spec{"lr", linear::Loss::multinomial, cal::Method::native, 1e-2, false};
    const int k = 4;
    const uint64_t seed = 77;
    auto oof = stack::oof_probabilities(X, y, spec, k, seed, classes, 2);

    // reconstruct each fold model independently and compare rows
    for (int f = 0; f < k; ++f) {
        std::vector<SparseVec> tr_x;
        std::vector<std::string> tr_y;
        for (size_t i = 0; i < X.size(); ++i) {
            if (oof.folds.fold[i] != f) {
                tr_x.push_back(X[i]);
                tr_y.push_back(y[i]);
            }
        }
        auto model = linear::train_logreg(tr_x, tr_y, spec.lambda, linear::Mode::multinomial, nullptr,
                                          &classes, {}, nullptr, 2);
        for (size_t i = 0; i < X.size(); ++i) {
            if (oof.folds.fold[i] != f) continue;
            auto expected = model.predict_proba(X[i]);
            for (size_t c = 0; c < expected.size(); ++c)
                CHECK(oof.probs[i][c] == Catch::Approx(expected[c]).margin(1e-12));
        }
    }
}

TEST_CASE("a fold stripping out an entire class is rejected") {
    std::vector<SparseVec> X(6);
    std::vector<std::string> y{"a", "a", "a", "a", "a", "b"};
    for (size_t i = 0; i < 6; ++i) X[i].push(0, static_cast<double>(i));
    stack::BaseSpec spec{"lr", linear::Loss::logistic, cal::Method::native, 1e-2, false};
    // k=3 with a single "b" sample: the fold holding it trains without class b
    CHECK_THROWS_AS(stack::oof_probabilities(X, y, spec, 3, 1, {"a", "b"}, 1), DataError);
}

TEST_CASE("permuting samples together with the fold assignment permutes rows") {
    std::vector<SparseVec> X;
    std::vector<std::string> y;
    synth::make_blobs(10, 2, 9, 1.0, X, y);
    std::vector<std::string> classes{"c0", "c1"};
    stack::BaseSpec spec{"lr", linear::Loss::logistic, cal::Method::native, 1e-2, false};
    auto folds = stack::stratified_folds(y, 5, 13);
    auto oof = stack::oof_probabilities(X, y, spec, folds, 13, classes, 2);

    // rotate samples and the fold assignment together: every sample keeps its
    // training-fold composition, so its probability row must follow it
    size_t n = X.size();
    std::vector<SparseVec> xr(n);
    std::vector<std::string> yr(n);
    stack::FoldAssignment fr;
    fr.k = folds.k;
    fr.fold.resize(n);
    for (size_t i = 0; i < n; ++i) {
        size_t j = (i + 7) % n;
        xr[j] = X[i];
        yr[j] = y[i];
        fr.fold[j] = folds.fold[i];
    }
    auto oof_r = stack::oof_probabilities(xr, yr, spec, fr, 13, classes, 2);
    for (size_t i = 0; i < n; ++i) {
        size_t j = (i + 7) % n;
        REQUIRE(oof_r.probs[j].size() == oof.probs[i].size());
        for (size_t c = 0; c < oof.probs[i].size(); ++c)
            CHECK(oof_r.probs[j][c] == Catch::Approx(oof.probs[i][c]).margin(1e-6));
    }
}

TEST_CASE("meta input width is bases x classes") {
    std::vector<SparseVec> X;
    std::vector<std::string> y;
    synth::make_blobs(15, 3, 31, 1.2, X, y);
    stack::StackOptions opts;
    opts.folds = 3;
    opts.seed = 5;
    opts.meta_lambda_grid = {1e-2};
    auto sm = stack::train_stack(X, y, stack::default_base_specs(1e-2), {"c0", "c1", "c2"}, 2, opts);
    CHECK(sm.bases.size() == 4);
    CHECK(sm.meta.dim == 12);  // 4 bases x 3 classes
    CHECK(sm.meta_input(X[0]).size() == 12);
    CHECK(sm.meta.loss == linear::Loss::crammer_singer);
}

TEST_CASE("stacking handles class sets of size 2, 3 and 5") {
    for (int n_classes : {2, 3, 5}) {
        std::vector<SparseVec> X;
        std::vector<std::string> y;
        std::vector<std::string> classes;
        auto eng = rng::make_engine(101 + n_classes);
        for (int c = 0; c < n_classes; ++c) {
            classes.push_back("c" + std::to_string(c));
            for (int i = 0; i < 12; ++i) {
                SparseVec v;
                v.push(0, static_cast<double>(c) + 0.3 * rng::normal(eng));
                v.push(1, static_cast<double>(c % 2) + 0.3 * rng::normal(eng));
                X.push_back(std::move(v));
                y.push_back(classes.back());
            }
        }
        stack::StackOptions opts;
        opts.folds = 3;
        opts.seed = 17;
        opts.meta_lambda_grid = {1e-2};
        auto sm = stack::train_stack(X, y, stack::default_base_specs(1e-2), classes, 2, opts);
        auto label = sm.predict(X[0]);
        CHECK(std::find(classes.begin(), classes.end(), label) != classes.end());
        CHECK(stack::stack_predict(sm, X[0]) == sm.predict(X[0]));  // deterministic
    }
}

TEST_CASE("the meta learner recovers perfect bases among random ones") {
    // hand-built out-of-fold matrix: bases 0 and 2 emit the true one-hot
    // distribution, bases 1 and 3 emit random simplex noise
    auto eng = rng::make_engine(203);
    const int n_classes = 3;
    const size_t n = 300;
    std::vector<SparseVec> Z;
    std::vector<std::string> y;
    std::vector<std::string> classes{"c0", "c1", "c2"};
    for (size_t i = 0; i < n; ++i) {
        int yi = static_cast<int>(i % n_classes);
        y.push_back(classes[yi]);
        std::vector<double> row;
        for (int b = 0; b < 4; ++b) {
            std::vector<double> p(n_classes);
            if (b % 2 == 0) {
                p[yi] = 1.0;
            } else {
                double sum = 0;
                for (double& v : p) {
                    v = rng::uniform01(eng) + 1e-3;
                    sum += v;
                }
                for (double& v : p) v /= sum;
            }
            row.insert(row.end(), p.begin(), p.end());
        }
        SparseVec v;
        for (size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0.0) v.push(static_cast<uint32_t>(j), row[j]);
        Z.push_back(std::move(v));
    }
    auto cw = linear::balanced_weights(y, &classes);
    auto meta = linear::train_svm(Z, y, 1e-3, linear::Mode::crammer_singer, &cw, &classes, {}, nullptr, 12);
    size_t correct = 0;
    for (size_t i = 0; i < n; ++i) correct += meta.predict(Z[i]) == y[i];
    CHECK(static_cast<double>(correct) / static_cast<double>(n) >= 0.99);
}
