#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sentikit/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace sentikit;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() : path(std::filesystem::temp_directory_path() / "sentikit_pipe_test") {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        auto p = (path / name).string();
        std::ofstream out(p);
        out << content;
        return p;
    }
};

}  // namespace

TEST_CASE("config files parse with sections and resolve relative paths") {
    TempDir dir;
    dir.file("words.txt", "good\n");
    auto cfg_path = dir.file("run.cfg",
                             "[run]\n"
                             "subtask = B\n"
                             "seed = 17\n"
                             "# a comment\n"
                             "[features]\n"
                             "char_ngrams = off\n"
                             "[vectorize]\n"
                             "hash_dim = 4096\n"
                             "alpha = 0.4\n"
                             "[model]\n"
                             "lambda = 0.01\n"
                             "[resources]\n"
                             "negators = words.txt\n");
    auto rc = cfg::run_config_from_file(cfg_path);
    CHECK(rc.subtask == cfg::Subtask::B);
    CHECK(rc.seed == 17);
    CHECK_FALSE(rc.features.char_ngrams);
    CHECK(rc.vectorize.hash.dim == 4096);
    CHECK(rc.vectorize.alpha == 0.4);
    CHECK(rc.model.lambda == 0.01);
    REQUIRE(rc.paths.negators.has_value());
    CHECK(std::filesystem::path(*rc.paths.negators).is_absolute());
}

TEST_CASE("subtask defaults mirror the submitted systems") {
    auto a = cfg::default_config(cfg::Subtask::A);
    CHECK(a.model.kind == cfg::ModelKind::stacked);
    CHECK(a.features.embeddings);
    CHECK(a.measure == cfg::Measure::f1_pn);

    auto b = cfg::default_config(cfg::Subtask::B);
    CHECK(b.model.kind == cfg::ModelKind::single);
    CHECK(b.model.loss == linear::Loss::hinge);
    CHECK_FALSE(b.features.embeddings);
    CHECK(b.measure == cfg::Measure::macro_recall);

    auto c = cfg::default_config(cfg::Subtask::C);
    CHECK(c.model.loss == linear::Loss::multinomial);
    CHECK(c.measure == cfg::Measure::mae_macro);
    CHECK(c.schema() == corpus::Schema::CE);

    auto d = cfg::default_config(cfg::Subtask::D);
    CHECK(d.model.loss == linear::Loss::hinge);
    CHECK(d.measure == cfg::Measure::kld);
    CHECK(d.schema() == corpus::Schema::BD);
}

TEST_CASE("malformed configs raise usage errors") {
    TempDir dir;
    auto p1 = dir.file("bad1.cfg", "[run\nsubtask = A\n");
    CHECK_THROWS_AS(cfg::run_config_from_file(p1), UsageError);
    auto p2 = dir.file("bad2.cfg", "keyonly\n");
    CHECK_THROWS_AS(cfg::run_config_from_file(p2), UsageError);
    auto p3 = dir.file("bad3.cfg", "[vectorize]\nhash_dim = 100\n");
    CHECK_THROWS_AS(cfg::run_config_from_file(p3), DataError);
}

TEST_CASE("missing enabled resources fail naming the missing key") {
    auto rc = cfg::default_config(cfg::Subtask::B);
    rc.features.manual_lex = true;  // no paths configured
    try {
        pipeline::load_resources(rc);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("manual_lex") != std::string::npos);
        CHECK(std::string(e.what()).find("bingliu") != std::string::npos);
    }
}

TEST_CASE("resource loading honors configured lexicon paths") {
    TempDir dir;
    auto rc = cfg::default_config(cfg::Subtask::B);
    rc.paths.bingliu_pos = dir.file("pos.txt", "good\ngreat\n");
    rc.paths.bingliu_neg = dir.file("neg.txt", "bad\n");
    rc.paths.s140 = dir.file("s140.txt", "good\t2.5\nbad\t-1.0\n");
    rc.paths.clusters = dir.file("clusters.txt", "0101\tgood\n0110\tbad\n");
    rc.features.embeddings = false;
    auto res = pipeline::load_resources(rc);
    CHECK(res.manual.size() == 1);
    CHECK(res.manual[0].positive.count("great") == 1);
    CHECK(res.scored.size() == 1);
    CHECK(res.clusters->clusters.at("good") == "0101");
}

TEST_CASE("pos tag files align by record id") {
    TempDir dir;
    auto path = dir.file("tags.txt", "t1\tN V\nt2\tA\n");
    auto tags = pipeline::load_pos_tags(path);
    CHECK(tags.at("t1") == std::vector<std::string>{"N", "V"});

    corpus::Dataset ds;
    ds.schema = corpus::Schema::A;
    ds.records = {{"t1", {}, std::string("positive"), "good day"},
                  {"t3", {}, std::string("negative"), "bad"}};
    auto res = synth::make_resources(false);
    auto prepared = pipeline::prepare(ds, res, &tags);
    REQUIRE(prepared.tags[0].has_value());  // t1 has aligned tags
    CHECK_FALSE(prepared.tags[1].has_value());  // t3 absent from the file

    corpus::Dataset bad;
    bad.schema = corpus::Schema::A;
    bad.records = {{"t2", {}, std::string("positive"), "three word text"}};
    CHECK_THROWS_AS(pipeline::prepare(bad, res, &tags), DataError);  // 1 tag, 3 tokens
}

TEST_CASE("end-to-end: train, save, reload, predict on a tiny corpus") {
    auto rc = cfg::default_config(cfg::Subtask::B);
    rc.model.kind = cfg::ModelKind::single;
    rc.vectorize.hash.dim = 1u << 12;
    rc.features.embeddings = false;
    auto train = synth::make_dataset({.size = 60, .seed = 3, .schema = corpus::Schema::BD});
    auto res = synth::make_resources(false);
    auto container = pipeline::train_container(rc, train, res);

    auto test = synth::make_dataset({.size = 30, .seed = 4, .schema = corpus::Schema::BD, .id_offset = 600});
    auto preds = pipeline::predict_container(container, test);
    auto gold = test.labels();
    size_t correct = 0;
    for (size_t i = 0; i < preds.size(); ++i) correct += preds[i] == gold[i];
    CHECK(static_cast<double>(correct) / static_cast<double>(preds.size()) > 0.8);
}

TEST_CASE("kld measure wiring groups by topic") {
    std::vector<std::string> gold{"positive", "positive", "negative", "positive", "negative", "negative"};
    std::vector<std::string> pred{"positive", "negative", "negative", "positive", "negative", "negative"};
    std::vector<std::string> topics{"a", "a", "a", "b", "b", "b"};
    double v = pipeline::compute_measure(cfg::Measure::kld, gold, pred, corpus::classes2(), &topics);
    // per-topic smoothed divergences, computed by hand
    auto kld_pair = [](double pt, double qt, size_t n) {
        double eps = 1.0 / (2.0 * static_cast<double>(n));
        double denom = 1.0 + 2.0 * eps;
        double a = (pt + eps) / denom, b = (1.0 - pt + eps) / denom;
        double c = (qt + eps) / denom, d = (1.0 - qt + eps) / denom;
        return a * std::log(a / c) + b * std::log(b / d);
    };
    double expected = 0.5 * (kld_pair(2.0 / 3.0, 1.0 / 3.0, 3) + kld_pair(1.0 / 3.0, 1.0 / 3.0, 3));
    CHECK(v == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("jobs > 1 reproduces the serial result") {
    auto rc = cfg::default_config(cfg::Subtask::C);
    rc.vectorize.hash.dim = 1u << 12;
    rc.features.embeddings = false;
    auto train = synth::make_dataset({.size = 50, .seed = 13, .schema = corpus::Schema::CE});
    auto res = synth::make_resources(false);
    auto serial = pipeline::train_container(rc, train, res);
    rc.jobs = 4;
    auto parallel = pipeline::train_container(rc, train, res);
    CHECK(io::serialize_container(serial) == io::serialize_container(parallel));
}
