// End-to-end orchestration: resource loading, document preparation,
// feature extraction, model training into self-contained containers,
// prediction, and measure computation.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentikit/config.hpp"
#include "sentikit/corpus.hpp"
#include "sentikit/ensemble.hpp"
#include "sentikit/evalq.hpp"
#include "sentikit/features.hpp"
#include "sentikit/model_io.hpp"
#include "sentikit/text.hpp"
#include "sentikit/vectorize.hpp"

namespace sentikit::pipeline {

// Per-document POS tags, keyed by record id: `id<TAB>tag1 tag2 ...`.
inline std::map<std::string, std::vector<std::string>> load_pos_tags(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open POS tag file: " + path);
    std::map<std::string, std::vector<std::string>> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty()) continue;
        auto fields = str::split_limit(t, '\t', 2);
        if (fields.size() != 2)
            throw DataError("POS tag line " + std::to_string(line_no) + ": expected id<TAB>tags");
        std::vector<std::string> tags;
        for (const auto& tag : str::split(fields[1], ' '))
            if (!str::trim(tag).empty()) tags.emplace_back(str::trim(tag));
        out[fields[0]] = std::move(tags);
    }
    return out;
}

// Loads only the resources enabled families actually need; a family that is
// enabled but has no configured path fails with the missing key's name.
inline feat::Resources load_resources(const cfg::RunConfig& rc) {
    const auto& p = rc.paths;
    feat::Resources res;
    if (rc.features.manual_lex) {
        if (p.bingliu_pos && p.bingliu_neg)
            res.manual.push_back(lex::load_bingliu_pair(*p.bingliu_pos, *p.bingliu_neg));
        else if (p.bingliu_pos || p.bingliu_neg)
            throw DataError("manual_lex: both resources.bingliu_pos and resources.bingliu_neg are required");
        if (p.mpqa) res.manual.push_back(lex::load_mpqa(*p.mpqa));
        if (p.nrc) res.manual.push_back(lex::load_nrc_emotion(*p.nrc));
        if (res.manual.empty())
            throw DataError("manual_lex enabled but no lexicon path set "
                            "(resources.bingliu_pos/bingliu_neg, resources.mpqa or resources.nrc)");
    }
    if (rc.features.scored_lex) {
        if (p.s140) res.scored.push_back(lex::load_scored(*p.s140, "s140"));
        if (p.hashtag_lex) res.scored.push_back(lex::load_scored(*p.hashtag_lex, "hashtag"));
        if (res.scored.empty())
            throw DataError("scored_lex enabled but no lexicon path set "
                            "(resources.s140 or resources.hashtag_lex)");
    }
    if (rc.features.clusters) {
        if (!p.clusters) throw DataError("clusters enabled but resources.clusters is not set");
        res.clusters = lex::load_clusters(*p.clusters);
    }
    if (rc.features.embeddings) {
        if (!p.embeddings) throw DataError("embeddings enabled but resources.embeddings is not set");
        res.embeddings = feat::load_embeddings(*p.embeddings);
    }
    if (p.tagset) res.tagset = lex::load_tagset(*p.tagset);
    if (p.negators) {
        auto words = text::load_word_list(*p.negators);
        if (words.empty()) throw DataError("negator list is empty: " + *p.negators);
        res.negators = std::move(words);
    }
    if (p.emoticons_pos) res.emoticons.positive = text::load_word_list(*p.emoticons_pos);
    if (p.emoticons_neg) res.emoticons.negative = text::load_word_list(*p.emoticons_neg);
    return res;
}

struct PreparedDocs {
    std::vector<text::TokenizedDoc> docs;
    std::vector<std::optional<lex::PosTagging>> tags;  // aligned with docs
};

inline PreparedDocs prepare(const corpus::Dataset& ds, const feat::Resources& res,
                            const std::map<std::string, std::vector<std::string>>* pos_tags = nullptr) {
    PreparedDocs out;
    out.docs.reserve(ds.records.size());
    out.tags.resize(ds.records.size());
    for (size_t i = 0; i < ds.records.size(); ++i) {
        const auto& rec = ds.records[i];
        auto doc = text::mark_negation(text::tokenize(rec.text), res.negators);
        if (pos_tags) {
            auto it = pos_tags->find(rec.id);
            if (it != pos_tags->end()) {
                if (it->second.size() != doc.tokens.size())
                    throw DataError("record '" + rec.id + "': " + std::to_string(it->second.size()) +
                                    " POS tags for " + std::to_string(doc.tokens.size()) + " tokens");
                out.tags[i] = lex::PosTagging{it->second};
            }
        }
        out.docs.push_back(std::move(doc));
    }
    return out;
}

inline std::vector<feat::FeatureBundle> extract_bundles(const PreparedDocs& prepared,
                                                        const feat::FeatureConfig& fc,
                                                        const feat::Resources& res, int jobs = 1) {
    std::vector<feat::FeatureBundle> bundles(prepared.docs.size());
    parallel_for(prepared.docs.size(), jobs, [&](size_t i) {
        const lex::PosTagging* tags = prepared.tags[i] ? &*prepared.tags[i] : nullptr;
        bundles[i] = feat::extract(prepared.docs[i], tags, fc, res);
    });
    return bundles;
}

// ---- training ------------------------------------------------------------

inline std::vector<stack::BaseSpec> stack_specs(const cfg::RunConfig& rc) {
    auto specs = stack::default_base_specs(rc.stack.base_lambda);
    for (auto& s : specs) {
        auto it = rc.stack.lambda_overrides.find(s.id);
        if (it != rc.stack.lambda_overrides.end()) s.lambda = it->second;
    }
    return specs;
}

inline linear::LinearModel train_single(const cfg::RunConfig& rc, const std::vector<SparseVec>& X,
                                        const std::vector<std::string>& y, size_t dim,
                                        linear::TrainInfo* info = nullptr) {
    const auto& classes = rc.classes();
    linear::ClassWeights cw;
    const linear::ClassWeights* cwp = nullptr;
    if (rc.model.balanced) {
        cw = linear::balanced_weights(y, &classes);
        cwp = &cw;
    }
    linear::TrainOptions opts = rc.train;
    opts.jobs = rc.jobs;
    switch (rc.model.loss) {
        case linear::Loss::hinge:
            return linear::train_svm(X, y, rc.model.lambda, linear::Mode::ovr, cwp, &classes, opts, info, dim);
        case linear::Loss::crammer_singer:
            return linear::train_svm(X, y, rc.model.lambda, linear::Mode::crammer_singer, cwp, &classes,
                                     opts, info, dim);
        case linear::Loss::logistic:
            return linear::train_logreg(X, y, rc.model.lambda, linear::Mode::ovr, cwp, &classes, opts, info,
                                        dim);
        case linear::Loss::multinomial:
            return linear::train_logreg(X, y, rc.model.lambda, linear::Mode::multinomial, cwp, &classes,
                                        opts, info, dim);
    }
    throw DataError("unreachable model loss");
}

struct TrainSummary {
    size_t n_documents = 0;
    size_t n_categorical_keys = 0;
    size_t vector_dim = 0;
    double objective = 0.0;
};

// Predicts with the container's featurization path; tags are the optional
// per-document POS annotations (absent tags mean a zero POS block).
inline std::vector<std::string> predict_container(const io::ModelContainer& c, const corpus::Dataset& ds,
                                                  const std::map<std::string, std::vector<std::string>>*
                                                      pos_tags = nullptr,
                                                  int jobs = 1) {
    auto prepared = prepare(ds, c.resources, pos_tags);
    auto bundles = extract_bundles(prepared, c.features, c.resources, jobs);
    std::vector<std::string> out(bundles.size());
    parallel_for(bundles.size(), jobs, [&](size_t i) {
        SparseVec x = c.vectorizer.transform(bundles[i]);
        out[i] = c.kind == io::ModelKind::single ? c.single.predict(x) : c.stacked.predict(x);
    });
    return out;
}

inline std::string predict_one_text(const io::ModelContainer& c, const std::string& raw_text) {
    auto doc = text::mark_negation(text::tokenize(raw_text), c.resources.negators);
    auto fb = feat::extract(doc, nullptr, c.features, c.resources);
    SparseVec x = c.vectorizer.transform(fb);
    return c.kind == io::ModelKind::single ? c.single.predict(x) : c.stacked.predict(x);
}

// Re-predicts the stored fingerprint corpus; a mismatch means the container
// no longer reproduces the predictions it was saved with.
inline void verify_fingerprint(const io::ModelContainer& c) {
    for (const auto& fp : c.fingerprint) {
        std::string got = predict_one_text(c, fp.text);
        if (got != fp.label)
            throw DataError("container fingerprint mismatch: text '" + fp.text + "' predicted '" + got +
                            "', stored '" + fp.label + "'");
    }
}

inline io::ModelContainer train_container(const cfg::RunConfig& rc, const corpus::Dataset& train,
                                          const feat::Resources& res, TrainSummary* summary = nullptr) {
    if (train.records.empty()) throw DataError("training dataset is empty");
    std::map<std::string, std::vector<std::string>> pos_tags;
    const std::map<std::string, std::vector<std::string>>* tags_ptr = nullptr;
    if (rc.features.pos && rc.paths.pos_tags) {
        pos_tags = load_pos_tags(*rc.paths.pos_tags);
        tags_ptr = &pos_tags;
    }
    auto prepared = prepare(train, res, tags_ptr);
    auto bundles = extract_bundles(prepared, rc.features, res, rc.jobs);

    vec::Vectorizer vectorizer(rc.vectorize);
    vectorizer.fit(bundles);
    std::vector<SparseVec> X(bundles.size());
    parallel_for(bundles.size(), rc.jobs, [&](size_t i) { X[i] = vectorizer.transform(bundles[i]); });

    auto y = train.labels();
    const size_t dim = vectorizer.total_dim();

    io::ModelContainer container;
    container.schema = rc.schema();
    container.subtask = cfg::subtask_name(rc.subtask);
    container.seed = rc.seed;
    container.features = rc.features;
    container.resources = res;
    container.vectorizer = vectorizer;

    linear::TrainInfo info;
    if (rc.model.kind == cfg::ModelKind::single) {
        container.kind = io::ModelKind::single;
        container.single = train_single(rc, X, y, dim, &info);
    } else {
        container.kind = io::ModelKind::stacked;
        stack::StackOptions so;
        so.folds = rc.stack.folds;
        so.seed = rc.seed;
        so.meta_lambda_grid = rc.stack.meta_lambda_grid;
        so.train = rc.train;
        so.jobs = rc.jobs;
        container.stacked = stack::train_stack(X, y, stack_specs(rc), rc.classes(), dim, so);
    }

    // Fingerprint: predictions over a few training texts, computed through
    // the same path a loaded container will use (no side POS annotations).
    const size_t n_fp = std::min<size_t>(8, train.records.size());
    for (size_t i = 0; i < n_fp; ++i) {
        const std::string& text = train.records[i].text;
        container.fingerprint.push_back({text, predict_one_text(container, text)});
    }

    if (summary) {
        summary->n_documents = train.records.size();
        size_t keys = 0;
        for (const auto& fb : bundles) keys += fb.categorical.size();
        summary->n_categorical_keys = keys;
        summary->vector_dim = dim;
        for (const auto& sub : info.subproblems) summary->objective += sub.objective;
    }
    return container;
}

// ---- measures over datasets -------------------------------------------------

// Computes the named measure. `topics` is required for KLD (per-topic
// classify-and-count, mean smoothed divergence over topics).
inline double compute_measure(cfg::Measure m, const std::vector<std::string>& gold,
                              const std::vector<std::string>& pred,
                              const std::vector<std::string>& classes,
                              const std::vector<std::string>* topics = nullptr) {
    switch (m) {
        case cfg::Measure::f1_pn:
            return eval::f1_pn(eval::ConfusionMatrix::from(gold, pred, classes));
        case cfg::Measure::macro_recall:
            return eval::macro_recall(eval::ConfusionMatrix::from(gold, pred, classes));
        case cfg::Measure::accuracy:
            return eval::ConfusionMatrix::from(gold, pred, classes).accuracy();
        case cfg::Measure::mae_macro: {
            auto to_int = [](const std::vector<std::string>& v) {
                std::vector<int> out;
                out.reserve(v.size());
                for (const auto& s : v) {
                    auto l = corpus::parse_label5(s);
                    if (!l) throw DataError("label '" + s + "' is not a five-point value");
                    out.push_back(*l);
                }
                return out;
            };
            return eval::mae_macro(to_int(gold), to_int(pred));
        }
        case cfg::Measure::kld: {
            if (!topics) throw DataError("KLD needs per-record topics");
            std::map<std::string, std::vector<size_t>> groups;
            for (size_t i = 0; i < topics->size(); ++i) groups[(*topics)[i]].push_back(i);
            double sum = 0.0;
            for (const auto& [topic, idx] : groups) {
                std::vector<std::string> g, p;
                for (size_t i : idx) {
                    g.push_back(gold[i]);
                    p.push_back(pred[i]);
                }
                auto truth = eval::prevalence_from_labels(g, classes);
                auto est = eval::prevalence_from_labels(p, classes);
                sum += eval::kld_smoothed(truth, est, idx.size());
            }
            return sum / static_cast<double>(groups.size());
        }
    }
    throw DataError("unreachable measure");
}

inline std::vector<std::string> dataset_topics(const corpus::Dataset& ds) {
    std::vector<std::string> topics;
    topics.reserve(ds.records.size());
    for (const auto& r : ds.records) topics.push_back(r.topic ? *r.topic : "");
    return topics;
}

}  // namespace sentikit::pipeline
