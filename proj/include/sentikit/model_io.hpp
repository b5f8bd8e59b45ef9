// Versioned JSON container for trained artifacts. A container is fully
// self-contained: it embeds the vectorizer, the model(s), calibration maps
// and every lexicon resource needed to featurize unseen text, so `predict`
// needs nothing but the container and the data. Serialization is
// deterministic: object keys are sorted and doubles use shortest
// round-trip formatting, so identical runs produce identical bytes.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentikit/calibrate.hpp"
#include "sentikit/common.hpp"
#include "sentikit/corpus.hpp"
#include "sentikit/ensemble.hpp"
#include "sentikit/features.hpp"
#include "sentikit/linear.hpp"
#include "sentikit/vectorize.hpp"

namespace sentikit::io {

using nlohmann::json;

inline constexpr int kContainerVersion = 1;

// ---- encoders ----------------------------------------------------------

inline json encode(const vec::HashSpec& h) {
    return json{{"dim", h.dim}, {"seed", h.seed}, {"sign_hash", h.sign_hash}};
}

inline vec::HashSpec decode_hash_spec(const json& j) {
    vec::HashSpec h;
    h.dim = j.at("dim").get<uint32_t>();
    h.seed = j.at("seed").get<uint64_t>();
    h.sign_hash = j.at("sign_hash").get<bool>();
    return h;
}

inline json encode(const vec::Vectorizer& v) {
    json j;
    j["hash"] = encode(v.options().hash);
    j["alpha"] = v.options().alpha;
    j["weighting"] = v.options().weighting == vec::Weighting::tfidf ? "tfidf" : "alpha_power";
    json layout = json::array();
    for (const auto& b : v.layout()) layout.push_back(json{{"name", b.name}, {"scale", b.scale}});
    j["dense_layout"] = layout;
    if (v.options().weighting == vec::Weighting::tfidf) {
        json df = json::object();
        for (const auto& [k, d] : v.idf().df) df[k] = d;
        j["idf"] = json{{"n_docs", v.idf().n_docs}, {"df", df}};
    }
    return j;
}

inline vec::Vectorizer decode_vectorizer(const json& j) {
    vec::VectorizeOptions opts;
    opts.hash = decode_hash_spec(j.at("hash"));
    opts.alpha = j.at("alpha").get<double>();
    opts.weighting =
        j.at("weighting").get<std::string>() == "tfidf" ? vec::Weighting::tfidf : vec::Weighting::alpha_power;
    std::vector<vec::DenseScale> layout;
    for (const auto& b : j.at("dense_layout"))
        layout.push_back({b.at("name").get<std::string>(), b.at("scale").get<std::vector<double>>()});
    vec::TfidfTable idf;
    if (j.contains("idf")) {
        idf.n_docs = j.at("idf").at("n_docs").get<size_t>();
        for (const auto& [k, d] : j.at("idf").at("df").items()) idf.df[k] = d.get<size_t>();
    }
    vec::Vectorizer v;
    v.restore(opts, std::move(layout), std::move(idf));
    return v;
}

inline json encode(const linear::LinearModel& m) {
    json j;
    j["classes"] = m.classes;
    j["loss"] = linear::loss_name(m.loss);
    j["lambda"] = m.lambda;
    j["dim"] = m.dim;
    j["support"] = m.support;
    j["weights"] = m.weights;
    j["bias"] = m.bias;
    return j;
}

inline linear::LinearModel decode_linear_model(const json& j) {
    linear::LinearModel m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.loss = linear::parse_loss(j.at("loss").get<std::string>());
    m.lambda = j.at("lambda").get<double>();
    m.dim = j.at("dim").get<size_t>();
    m.support = j.at("support").get<std::vector<uint32_t>>();
    m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    m.bias = j.at("bias").get<std::vector<double>>();
    return m;
}

inline json encode(const cal::CalibratedModel& cm) {
    json j;
    j["base"] = encode(cm.base);
    j["method"] = cal::method_name(cm.method);
    if (cm.method == cal::Method::platt) {
        json p = json::array();
        for (const auto& pp : cm.platt) p.push_back(json{{"a", pp.a}, {"b", pp.b}});
        j["platt"] = p;
    } else if (cm.method == cal::Method::isotonic) {
        json iso = json::array();
        for (const auto& im : cm.isotonic) iso.push_back(json{{"x", im.x}, {"y", im.y}});
        j["isotonic"] = iso;
    }
    return j;
}

inline cal::CalibratedModel decode_calibrated_model(const json& j) {
    cal::CalibratedModel cm;
    cm.base = decode_linear_model(j.at("base"));
    cm.method = cal::parse_method(j.at("method").get<std::string>());
    if (cm.method == cal::Method::platt) {
        for (const auto& p : j.at("platt"))
            cm.platt.push_back({p.at("a").get<double>(), p.at("b").get<double>()});
    } else if (cm.method == cal::Method::isotonic) {
        for (const auto& im : j.at("isotonic")) {
            cal::IsotonicMap map;
            map.x = im.at("x").get<std::vector<double>>();
            map.y = im.at("y").get<std::vector<double>>();
            cm.isotonic.push_back(std::move(map));
        }
    }
    return cm;
}

inline json encode(const stack::BaseSpec& s) {
    return json{{"id", s.id},
                {"loss", linear::loss_name(s.loss)},
                {"method", cal::method_name(s.method)},
                {"lambda", s.lambda},
                {"balanced", s.balanced}};
}

inline stack::BaseSpec decode_base_spec(const json& j) {
    stack::BaseSpec s;
    s.id = j.at("id").get<std::string>();
    s.loss = linear::parse_loss(j.at("loss").get<std::string>());
    s.method = cal::parse_method(j.at("method").get<std::string>());
    s.lambda = j.at("lambda").get<double>();
    s.balanced = j.at("balanced").get<bool>();
    return s;
}

inline json encode(const stack::StackedModel& sm) {
    json j;
    json specs = json::array(), bases = json::array();
    for (const auto& s : sm.specs) specs.push_back(encode(s));
    for (const auto& b : sm.bases) bases.push_back(encode(b));
    j["specs"] = specs;
    j["bases"] = bases;
    j["meta"] = encode(sm.meta);
    j["folds"] = sm.folds;
    j["seed"] = sm.seed;
    return j;
}

inline stack::StackedModel decode_stacked_model(const json& j) {
    stack::StackedModel sm;
    for (const auto& s : j.at("specs")) sm.specs.push_back(decode_base_spec(s));
    for (const auto& b : j.at("bases")) sm.bases.push_back(decode_calibrated_model(b));
    sm.meta = decode_linear_model(j.at("meta"));
    sm.folds = j.at("folds").get<int>();
    sm.seed = j.at("seed").get<uint64_t>();
    return sm;
}

inline json encode(const feat::FeatureConfig& c) {
    return json{{"word_ngrams", c.word_ngrams}, {"ngram_min", c.ngram_min}, {"ngram_max", c.ngram_max},
                {"char_ngrams", c.char_ngrams}, {"cgram_min", c.cgram_min}, {"cgram_max", c.cgram_max},
                {"surface", c.surface},         {"manual_lex", c.manual_lex}, {"scored_lex", c.scored_lex},
                {"clusters", c.clusters},       {"pos", c.pos},             {"embeddings", c.embeddings}};
}

inline feat::FeatureConfig decode_feature_config(const json& j) {
    feat::FeatureConfig c;
    c.word_ngrams = j.at("word_ngrams").get<bool>();
    c.ngram_min = j.at("ngram_min").get<int>();
    c.ngram_max = j.at("ngram_max").get<int>();
    c.char_ngrams = j.at("char_ngrams").get<bool>();
    c.cgram_min = j.at("cgram_min").get<int>();
    c.cgram_max = j.at("cgram_max").get<int>();
    c.surface = j.at("surface").get<bool>();
    c.manual_lex = j.at("manual_lex").get<bool>();
    c.scored_lex = j.at("scored_lex").get<bool>();
    c.clusters = j.at("clusters").get<bool>();
    c.pos = j.at("pos").get<bool>();
    c.embeddings = j.at("embeddings").get<bool>();
    return c;
}

inline json encode(const feat::Resources& r) {
    json j;
    json manual = json::array();
    for (const auto& lx : r.manual) {
        manual.push_back(json{{"name", lx.name},
                              {"positive", std::vector<std::string>(lx.positive.begin(), lx.positive.end())},
                              {"negative", std::vector<std::string>(lx.negative.begin(), lx.negative.end())}});
    }
    j["manual"] = manual;
    json scored = json::array();
    for (const auto& lx : r.scored) {
        json scores = json::object();
        for (const auto& [w, s] : lx.scores) scores[w] = s;
        scored.push_back(json{{"name", lx.name}, {"scores", scores}});
    }
    j["scored"] = scored;
    if (r.clusters) {
        json cl = json::object();
        for (const auto& [w, c] : r.clusters->clusters) cl[w] = c;
        j["clusters"] = cl;
    }
    if (r.embeddings) {
        json emb = json::object();
        for (const auto& [w, v] : r.embeddings->vectors) emb[w] = v;
        j["embeddings"] = json{{"dim", r.embeddings->dim}, {"vectors", emb}};
    }
    j["tagset"] = r.tagset;
    j["negators"] = std::vector<std::string>(r.negators.begin(), r.negators.end());
    j["emoticons_positive"] =
        std::vector<std::string>(r.emoticons.positive.begin(), r.emoticons.positive.end());
    j["emoticons_negative"] =
        std::vector<std::string>(r.emoticons.negative.begin(), r.emoticons.negative.end());
    return j;
}

inline feat::Resources decode_resources(const json& j) {
    feat::Resources r;
    for (const auto& m : j.at("manual")) {
        lex::ManualLexicon lx;
        lx.name = m.at("name").get<std::string>();
        for (const auto& w : m.at("positive")) lx.positive.insert(w.get<std::string>());
        for (const auto& w : m.at("negative")) lx.negative.insert(w.get<std::string>());
        r.manual.push_back(std::move(lx));
    }
    for (const auto& s : j.at("scored")) {
        lex::ScoredLexicon lx;
        lx.name = s.at("name").get<std::string>();
        for (const auto& [w, v] : s.at("scores").items()) lx.scores[w] = v.get<double>();
        r.scored.push_back(std::move(lx));
    }
    if (j.contains("clusters")) {
        lex::ClusterMap cm;
        for (const auto& [w, c] : j.at("clusters").items()) cm.clusters[w] = c.get<std::string>();
        r.clusters = std::move(cm);
    }
    if (j.contains("embeddings")) {
        feat::EmbeddingTable t;
        t.dim = j.at("embeddings").at("dim").get<size_t>();
        for (const auto& [w, v] : j.at("embeddings").at("vectors").items())
            t.vectors[w] = v.get<std::vector<double>>();
        r.embeddings = std::move(t);
    }
    r.tagset = j.at("tagset").get<std::vector<std::string>>();
    r.negators.clear();
    for (const auto& w : j.at("negators")) r.negators.insert(w.get<std::string>());
    r.emoticons.positive.clear();
    r.emoticons.negative.clear();
    for (const auto& w : j.at("emoticons_positive")) r.emoticons.positive.insert(w.get<std::string>());
    for (const auto& w : j.at("emoticons_negative")) r.emoticons.negative.insert(w.get<std::string>());
    return r;
}

// ---- container -----------------------------------------------------------

enum class ModelKind { single, stacked };

struct Fingerprint {
    std::string text;
    std::string label;
};

struct ModelContainer {
    corpus::Schema schema = corpus::Schema::A;
    std::string subtask = "A";
    uint64_t seed = 0;
    ModelKind kind = ModelKind::single;
    feat::FeatureConfig features;
    feat::Resources resources;
    vec::Vectorizer vectorizer;
    linear::LinearModel single;   // when kind == single
    stack::StackedModel stacked;  // when kind == stacked
    std::vector<Fingerprint> fingerprint;

    const std::vector<std::string>& classes() const {
        return kind == ModelKind::single ? single.classes : stacked.meta.classes;
    }
};

inline json encode(const ModelContainer& c) {
    json j;
    j["format"] = "sentikit-model";
    j["version"] = kContainerVersion;
    j["schema"] = corpus::schema_name(c.schema);
    j["subtask"] = c.subtask;
    j["seed"] = c.seed;
    j["kind"] = c.kind == ModelKind::single ? "single" : "stacked";
    j["features"] = encode(c.features);
    j["resources"] = encode(c.resources);
    j["vectorizer"] = encode(c.vectorizer);
    if (c.kind == ModelKind::single)
        j["model"] = encode(c.single);
    else
        j["model"] = encode(c.stacked);
    json fp = json::array();
    for (const auto& f : c.fingerprint) fp.push_back(json{{"text", f.text}, {"label", f.label}});
    j["fingerprint"] = fp;
    return j;
}

inline ModelContainer decode_container(const json& j) {
    if (j.value("format", "") != "sentikit-model") throw DataError("not a sentikit model container");
    if (j.at("version").get<int>() != kContainerVersion)
        throw DataError("unsupported container version " + std::to_string(j.at("version").get<int>()));
    ModelContainer c;
    std::string schema = j.at("schema").get<std::string>();
    if (schema == "A") c.schema = corpus::Schema::A;
    else if (schema == "BD") c.schema = corpus::Schema::BD;
    else if (schema == "CE") c.schema = corpus::Schema::CE;
    else throw DataError("unknown schema '" + schema + "' in container");
    c.subtask = j.at("subtask").get<std::string>();
    c.seed = j.at("seed").get<uint64_t>();
    c.kind = j.at("kind").get<std::string>() == "stacked" ? ModelKind::stacked : ModelKind::single;
    c.features = decode_feature_config(j.at("features"));
    c.resources = decode_resources(j.at("resources"));
    c.vectorizer = decode_vectorizer(j.at("vectorizer"));
    if (c.kind == ModelKind::single)
        c.single = decode_linear_model(j.at("model"));
    else
        c.stacked = decode_stacked_model(j.at("model"));
    for (const auto& f : j.at("fingerprint"))
        c.fingerprint.push_back({f.at("text").get<std::string>(), f.at("label").get<std::string>()});
    return c;
}

inline std::string serialize_container(const ModelContainer& c) { return encode(c).dump(2) + "\n"; }

inline void save_container(const ModelContainer& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open model file for writing: " + path);
    out << serialize_container(c);
}

inline ModelContainer load_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("malformed model container " + path + ": " + e.what());
    }
    return decode_container(j);
}

}  // namespace sentikit::io
