// Run configuration: a flat key-value file with [sections], per-subtask
// defaults mirroring the final submitted systems, and resource paths.
// Relative paths are resolved against the config file's directory.
#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentikit/calibrate.hpp"
#include "sentikit/common.hpp"
#include "sentikit/corpus.hpp"
#include "sentikit/features.hpp"
#include "sentikit/linear.hpp"
#include "sentikit/vectorize.hpp"

namespace sentikit::cfg {

enum class Subtask { A, B, C, D };

inline Subtask parse_subtask(std::string_view s) {
    if (s == "A" || s == "a") return Subtask::A;
    if (s == "B" || s == "b") return Subtask::B;
    if (s == "C" || s == "c") return Subtask::C;
    if (s == "D" || s == "d") return Subtask::D;
    throw UsageError("unknown subtask '" + std::string(s) + "' (expected A, B, C or D)");
}

inline std::string subtask_name(Subtask t) {
    switch (t) {
        case Subtask::A: return "A";
        case Subtask::B: return "B";
        case Subtask::C: return "C";
        case Subtask::D: return "D";
    }
    return "?";
}

inline corpus::Schema schema_for(Subtask t) {
    switch (t) {
        case Subtask::A: return corpus::Schema::A;
        case Subtask::B:
        case Subtask::D: return corpus::Schema::BD;
        case Subtask::C: return corpus::Schema::CE;
    }
    return corpus::Schema::A;
}

enum class Measure { f1_pn, macro_recall, mae_macro, kld, accuracy };

inline Measure default_measure(Subtask t) {
    switch (t) {
        case Subtask::A: return Measure::f1_pn;
        case Subtask::B: return Measure::macro_recall;
        case Subtask::C: return Measure::mae_macro;
        case Subtask::D: return Measure::kld;
    }
    return Measure::accuracy;
}

inline bool measure_maximizes(Measure m) {
    return m == Measure::f1_pn || m == Measure::macro_recall || m == Measure::accuracy;
}

inline std::string measure_name(Measure m) {
    switch (m) {
        case Measure::f1_pn: return "f1_pn";
        case Measure::macro_recall: return "macro_recall";
        case Measure::mae_macro: return "mae_macro";
        case Measure::kld: return "kld";
        case Measure::accuracy: return "accuracy";
    }
    return "?";
}

inline Measure parse_measure(std::string_view s) {
    if (s == "f1_pn") return Measure::f1_pn;
    if (s == "macro_recall") return Measure::macro_recall;
    if (s == "mae_macro") return Measure::mae_macro;
    if (s == "kld") return Measure::kld;
    if (s == "accuracy") return Measure::accuracy;
    throw UsageError("unknown measure '" + std::string(s) + "'");
}

// ---- key-value file ---------------------------------------------------------

struct KvFile {
    std::map<std::string, std::string> values;  // "section.key" -> value
    std::filesystem::path base_dir;

    bool has(const std::string& key) const { return values.count(key) > 0; }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        std::string v = str::lower(it->second);
        if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
        if (v == "off" || v == "false" || v == "no" || v == "0") return false;
        throw UsageError("config key '" + key + "': expected a boolean, got '" + it->second + "'");
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw UsageError("config key '" + key + "': expected a number, got '" + it->second + "'");
        }
    }

    long long get_int(const std::string& key, long long fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            return std::stoll(it->second);
        } catch (const std::exception&) {
            throw UsageError("config key '" + key + "': expected an integer, got '" + it->second + "'");
        }
    }

    // Resource paths resolve relative to the config file location.
    std::optional<std::string> get_path(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end() || it->second.empty()) return std::nullopt;
        std::filesystem::path p(it->second);
        if (p.is_relative()) p = base_dir / p;
        return p.string();
    }

    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        std::vector<double> out;
        for (const auto& part : str::split(it->second, ',')) {
            auto t = str::trim(part);
            if (t.empty()) continue;
            try {
                out.push_back(std::stod(std::string(t)));
            } catch (const std::exception&) {
                throw UsageError("config key '" + key + "': bad number '" + std::string(t) + "'");
            }
        }
        if (out.empty()) throw UsageError("config key '" + key + "': empty list");
        return out;
    }
};

inline KvFile parse_kv(std::istream& in, const std::filesystem::path& base_dir) {
    KvFile kv;
    kv.base_dir = base_dir;
    std::string line, section;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw UsageError("config line " + std::to_string(line_no) + ": unterminated section");
            section = std::string(str::trim(t.substr(1, t.size() - 2)));
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = std::string(str::trim(t.substr(0, eq)));
        std::string value = std::string(str::trim(t.substr(eq + 1)));
        if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
        kv.values[section.empty() ? key : section + "." + key] = value;
    }
    return kv;
}

inline KvFile parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    return parse_kv(in, std::filesystem::path(path).parent_path());
}

// ---- run configuration -------------------------------------------------------

enum class ModelKind { single, stacked };

struct ModelSpec {
    ModelKind kind = ModelKind::single;
    linear::Loss loss = linear::Loss::hinge;
    double lambda = 1e-3;
    bool balanced = true;
};

struct StackSpec {
    int folds = 5;
    double base_lambda = 1e-3;
    // optional per-base overrides, keyed by base id
    std::map<std::string, double> lambda_overrides;
    std::vector<double> meta_lambda_grid = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
};

struct ResourcePaths {
    std::optional<std::string> bingliu_pos, bingliu_neg, mpqa, nrc;
    std::optional<std::string> s140, hashtag_lex;
    std::optional<std::string> clusters, embeddings, tagset;
    std::optional<std::string> negators, emoticons_pos, emoticons_neg;
    std::optional<std::string> pos_tags;  // per-document tag file
};

struct Grid {
    std::vector<double> alphas = {0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<double> lambdas = {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1,
                                   1.0,  1e1,  1e2,  1e3,  1e4,  1e5,  1e6};
    std::vector<double> hash_dims = {262144.0};
};

struct RunConfig {
    Subtask subtask = Subtask::A;
    uint64_t seed = 42;
    int jobs = 1;
    feat::FeatureConfig features;
    vec::VectorizeOptions vectorize;
    ModelSpec model;
    StackSpec stack;
    ResourcePaths paths;
    Measure measure = Measure::f1_pn;
    Grid grid;
    int cv_folds = 5;
    linear::TrainOptions train;

    corpus::Schema schema() const { return schema_for(subtask); }
    const std::vector<std::string>& classes() const { return corpus::classes_for(schema()); }
};

// Defaults follow the submitted systems: subtask A uses the stacked
// ensemble over the full feature set including embeddings; B and D a
// weighted one-vs-rest hinge SVM; C a weighted multinomial logistic
// regression; B, C and D exclude the embedding features.
inline RunConfig default_config(Subtask t) {
    RunConfig rc;
    rc.subtask = t;
    rc.measure = default_measure(t);
    rc.features.embeddings = (t == Subtask::A);
    switch (t) {
        case Subtask::A:
            rc.model.kind = ModelKind::stacked;
            rc.model.loss = linear::Loss::crammer_singer;
            break;
        case Subtask::B:
        case Subtask::D:
            rc.model.kind = ModelKind::single;
            rc.model.loss = linear::Loss::hinge;
            break;
        case Subtask::C:
            rc.model.kind = ModelKind::single;
            rc.model.loss = linear::Loss::multinomial;
            break;
    }
    return rc;
}

inline RunConfig run_config_from_kv(const KvFile& kv, std::optional<Subtask> subtask_override = {}) {
    Subtask t = subtask_override ? *subtask_override : parse_subtask(kv.get("run.subtask", "A"));
    RunConfig rc = default_config(t);
    rc.seed = static_cast<uint64_t>(kv.get_int("run.seed", 42));
    rc.jobs = static_cast<int>(kv.get_int("run.jobs", 1));
    if (kv.has("run.model")) {
        std::string m = kv.get("run.model", "");
        if (m == "single") rc.model.kind = ModelKind::single;
        else if (m == "stacked") rc.model.kind = ModelKind::stacked;
        else throw UsageError("run.model must be 'single' or 'stacked'");
    }
    if (kv.has("run.measure")) rc.measure = parse_measure(kv.get("run.measure", ""));

    auto& f = rc.features;
    f.word_ngrams = kv.get_bool("features.word_ngrams", f.word_ngrams);
    f.ngram_min = static_cast<int>(kv.get_int("features.ngram_min", f.ngram_min));
    f.ngram_max = static_cast<int>(kv.get_int("features.ngram_max", f.ngram_max));
    f.char_ngrams = kv.get_bool("features.char_ngrams", f.char_ngrams);
    f.cgram_min = static_cast<int>(kv.get_int("features.cgram_min", f.cgram_min));
    f.cgram_max = static_cast<int>(kv.get_int("features.cgram_max", f.cgram_max));
    f.surface = kv.get_bool("features.surface", f.surface);
    f.manual_lex = kv.get_bool("features.manual_lex", f.manual_lex);
    f.scored_lex = kv.get_bool("features.scored_lex", f.scored_lex);
    f.clusters = kv.get_bool("features.clusters", f.clusters);
    f.pos = kv.get_bool("features.pos", f.pos);
    f.embeddings = kv.get_bool("features.embeddings", f.embeddings);

    auto& v = rc.vectorize;
    v.hash.dim = static_cast<uint32_t>(kv.get_int("vectorize.hash_dim", v.hash.dim));
    v.hash.seed = static_cast<uint64_t>(kv.get_int("vectorize.hash_seed", static_cast<long long>(v.hash.seed)));
    v.hash.sign_hash = kv.get_bool("vectorize.signed", v.hash.sign_hash);
    v.alpha = kv.get_double("vectorize.alpha", v.alpha);
    std::string weighting = kv.get("vectorize.weighting", "alpha");
    if (weighting == "alpha" || weighting == "alpha_power") v.weighting = vec::Weighting::alpha_power;
    else if (weighting == "tfidf") v.weighting = vec::Weighting::tfidf;
    else throw UsageError("vectorize.weighting must be 'alpha' or 'tfidf'");
    v.hash.validate();

    if (kv.has("model.loss")) rc.model.loss = linear::parse_loss(kv.get("model.loss", ""));
    rc.model.lambda = kv.get_double("model.lambda", rc.model.lambda);
    rc.model.balanced = kv.get_bool("model.class_weights", rc.model.balanced);

    rc.stack.folds = static_cast<int>(kv.get_int("stack.folds", rc.stack.folds));
    rc.stack.base_lambda = kv.get_double("stack.base_lambda", rc.stack.base_lambda);
    for (const char* id : {"svm_cs_isotonic", "svm_cs_platt", "logreg_ovr", "logreg_multinomial"}) {
        std::string key = std::string("stack.lambda_") + id;
        if (kv.has(key)) rc.stack.lambda_overrides[id] = kv.get_double(key, rc.stack.base_lambda);
    }
    rc.stack.meta_lambda_grid = kv.get_doubles("stack.meta_lambda_grid", rc.stack.meta_lambda_grid);

    auto& p = rc.paths;
    p.bingliu_pos = kv.get_path("resources.bingliu_pos");
    p.bingliu_neg = kv.get_path("resources.bingliu_neg");
    p.mpqa = kv.get_path("resources.mpqa");
    p.nrc = kv.get_path("resources.nrc");
    p.s140 = kv.get_path("resources.s140");
    p.hashtag_lex = kv.get_path("resources.hashtag_lex");
    p.clusters = kv.get_path("resources.clusters");
    p.embeddings = kv.get_path("resources.embeddings");
    p.tagset = kv.get_path("resources.tagset");
    p.negators = kv.get_path("resources.negators");
    p.emoticons_pos = kv.get_path("resources.emoticons_pos");
    p.emoticons_neg = kv.get_path("resources.emoticons_neg");
    p.pos_tags = kv.get_path("resources.pos_tags");

    rc.grid.alphas = kv.get_doubles("grid.alpha", rc.grid.alphas);
    rc.grid.lambdas = kv.get_doubles("grid.lambda", rc.grid.lambdas);
    rc.grid.hash_dims = kv.get_doubles("grid.hash_dim", rc.grid.hash_dims);
    rc.cv_folds = static_cast<int>(kv.get_int("grid.folds", rc.cv_folds));

    rc.train.tol = kv.get_double("train.tol", rc.train.tol);
    rc.train.max_iter = static_cast<int>(kv.get_int("train.max_iter", rc.train.max_iter));
    return rc;
}

inline RunConfig run_config_from_file(const std::string& path,
                                      std::optional<Subtask> subtask_override = {}) {
    return run_config_from_kv(parse_kv_file(path), subtask_override);
}

}  // namespace sentikit::cfg
