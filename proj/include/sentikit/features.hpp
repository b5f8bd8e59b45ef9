// Per-document feature assembly: token and character n-grams, surface
// statistics, lexicon blocks, cluster counts, POS-context counts and
// embedding compositions, gathered into one FeatureBundle.
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sentikit/common.hpp"
#include "sentikit/lexicons.hpp"
#include "sentikit/text.hpp"

namespace sentikit::feat {

// Categorical keys are namespaced by family ("w1:", "c3:", "cl:", ...);
// the map value is the key's multiplicity. Dense blocks appear in a fixed
// order that is identical for every document of a run.
struct DenseBlock {
    std::string name;
    std::vector<double> values;
};

struct FeatureBundle {
    std::map<std::string, double> categorical;
    std::vector<DenseBlock> dense;

    size_t dense_size() const {
        size_t n = 0;
        for (const auto& b : dense) n += b.values.size();
        return n;
    }
};

struct EmbeddingTable {
    size_t dim = 0;
    std::map<std::string, std::vector<double>> vectors;
};

// Text format: `word v1 v2 ... vdim` per line, space separated.
inline EmbeddingTable load_embeddings(std::istream& in) {
    EmbeddingTable table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty()) continue;
        std::istringstream iss{std::string(t)};
        std::string word;
        iss >> word;
        std::vector<double> vec;
        double v;
        while (iss >> v) vec.push_back(v);
        if (vec.empty())
            throw DataError("embeddings line " + std::to_string(line_no) + ": no vector values");
        if (table.dim == 0) table.dim = vec.size();
        if (vec.size() != table.dim)
            throw DataError("embeddings line " + std::to_string(line_no) + ": expected dim " +
                            std::to_string(table.dim) + ", got " + std::to_string(vec.size()));
        table.vectors[str::lower(word)] = std::move(vec);
    }
    return table;
}

inline EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embeddings file: " + path);
    return load_embeddings(in);
}

namespace detail {

// Token stream feeding word n-grams: lowered words (suffixed "_NEG" in a
// negated context), hashtags and emoticon surfaces; URLs and mentions
// become placeholders; numbers and punctuation are dropped.
inline std::vector<std::string> ngram_stream(const text::TokenizedDoc& doc) {
    std::vector<std::string> out;
    out.reserve(doc.tokens.size());
    for (const text::Token& t : doc.tokens) {
        switch (t.kind) {
            case text::TokenKind::word:
                out.push_back(t.negated ? t.lowered + "_NEG" : t.lowered);
                break;
            case text::TokenKind::hashtag:
            case text::TokenKind::emoticon:
                out.push_back(t.lowered);
                break;
            case text::TokenKind::url:
                out.push_back("<url>");
                break;
            case text::TokenKind::mention:
                out.push_back("<user>");
                break;
            default:
                break;
        }
    }
    return out;
}

}  // namespace detail

inline std::map<std::string, double> word_ngrams(const text::TokenizedDoc& doc, int nmin, int nmax) {
    if (nmin < 1 || nmin > nmax) throw DataError("invalid n-gram range");
    auto stream = detail::ngram_stream(doc);
    std::map<std::string, double> out;
    for (int n = nmin; n <= nmax; ++n) {
        if (stream.size() < static_cast<size_t>(n)) continue;
        for (size_t i = 0; i + n <= stream.size(); ++i) {
            std::string key = "w" + std::to_string(n) + ":";
            for (int j = 0; j < n; ++j) {
                if (j) key += ' ';
                key += stream[i + j];
            }
            out[key] += 1.0;
        }
    }
    return out;
}

// Character n-grams over the lowercased raw text with whitespace runs
// collapsed to single spaces; substrings may cross token boundaries.
inline std::map<std::string, double> char_ngrams(std::string_view raw, int mmin, int mmax) {
    if (mmin < 1 || mmin > mmax) throw DataError("invalid char-gram range");
    std::string s;
    s.reserve(raw.size());
    for (char c : str::lower(str::trim(raw))) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!s.empty() && s.back() != ' ') s.push_back(' ');
        } else {
            s.push_back(c);
        }
    }
    std::map<std::string, double> out;
    for (int m = mmin; m <= mmax; ++m) {
        if (s.size() < static_cast<size_t>(m)) continue;
        for (size_t i = 0; i + m <= s.size(); ++i)
            out["c" + std::to_string(m) + ":" + s.substr(i, m)] += 1.0;
    }
    return out;
}

inline constexpr size_t kPosCountSize = 48;  // 24 tags x {affirmative, negated}

// Tag occurrence counts partitioned by negation context, tag-major.
inline std::vector<double> pos_counts(const lex::PosTagging& tags, const text::TokenizedDoc& doc,
                                      const std::vector<std::string>& tagset = lex::default_tagset()) {
    if (tags.tags.size() != doc.tokens.size())
        throw DataError("POS tags misaligned: " + std::to_string(tags.tags.size()) + " tags for " +
                        std::to_string(doc.tokens.size()) + " tokens");
    std::vector<double> out(2 * tagset.size(), 0.0);
    std::map<std::string, size_t> tag_index;
    for (size_t i = 0; i < tagset.size(); ++i) tag_index[tagset[i]] = i;
    for (size_t i = 0; i < doc.tokens.size(); ++i) {
        auto it = tag_index.find(tags.tags[i]);
        if (it == tag_index.end())
            throw DataError("unknown POS tag '" + tags.tags[i] + "'");
        out[2 * it->second + (doc.tokens[i].negated ? 1 : 0)] += 1.0;
    }
    return out;
}

// [elementwise min, elementwise max, elementwise mean] over the vectors of
// in-vocabulary word tokens; all zeros when nothing is in vocabulary.
inline std::vector<double> embed_compose(const text::TokenizedDoc& doc, const EmbeddingTable& table) {
    std::vector<double> out(3 * table.dim, 0.0);
    size_t found = 0;
    for (const text::Token& t : doc.tokens) {
        if (t.kind != text::TokenKind::word) continue;
        auto it = table.vectors.find(t.lowered);
        if (it == table.vectors.end()) continue;
        const auto& v = it->second;
        if (found == 0) {
            for (size_t d = 0; d < table.dim; ++d) {
                out[d] = v[d];
                out[table.dim + d] = v[d];
                out[2 * table.dim + d] = v[d];
            }
        } else {
            for (size_t d = 0; d < table.dim; ++d) {
                out[d] = std::min(out[d], v[d]);
                out[table.dim + d] = std::max(out[table.dim + d], v[d]);
                out[2 * table.dim + d] += v[d];
            }
        }
        ++found;
    }
    if (found > 1)
        for (size_t d = 0; d < table.dim; ++d) out[2 * table.dim + d] /= static_cast<double>(found);
    return out;
}

// ---- bundle assembly -----------------------------------------------------

struct FeatureConfig {
    bool word_ngrams = true;
    int ngram_min = 1, ngram_max = 4;
    bool char_ngrams = true;
    int cgram_min = 3, cgram_max = 5;
    bool surface = true;
    bool manual_lex = true;
    bool scored_lex = true;
    bool clusters = true;
    bool pos = false;
    bool embeddings = false;
};

struct Resources {
    std::vector<lex::ManualLexicon> manual;
    std::vector<lex::ScoredLexicon> scored;
    std::optional<lex::ClusterMap> clusters;
    std::optional<EmbeddingTable> embeddings;
    std::vector<std::string> tagset = lex::default_tagset();
    std::set<std::string> negators = text::default_negators();
    text::EmoticonTable emoticons;
};

// Assembles the bundle for one document. Disabled families are absent,
// not zeroed, so the dense layout differs across configurations but is
// identical across documents for a fixed configuration.
inline FeatureBundle extract(const text::TokenizedDoc& doc, const lex::PosTagging* tags,
                             const FeatureConfig& cfg, const Resources& res) {
    FeatureBundle fb;
    if (cfg.word_ngrams) {
        for (auto& [k, v] : word_ngrams(doc, cfg.ngram_min, cfg.ngram_max)) fb.categorical[k] += v;
    }
    if (cfg.char_ngrams) {
        for (auto& [k, v] : char_ngrams(doc.raw, cfg.cgram_min, cfg.cgram_max)) fb.categorical[k] += v;
    }
    if (cfg.clusters) {
        if (!res.clusters) throw DataError("feature family 'clusters' enabled but no cluster map loaded");
        for (auto& [k, v] : lex::cluster_features(doc, *res.clusters)) fb.categorical[k] += v;
    }
    if (cfg.surface) {
        fb.dense.push_back({"surface", text::surface_stats(doc, res.emoticons).as_vector()});
    }
    if (cfg.manual_lex) {
        if (res.manual.empty())
            throw DataError("feature family 'manual_lex' enabled but no manual lexicon loaded");
        for (const auto& lx : res.manual)
            fb.dense.push_back({"manual:" + lx.name, lex::manual_features(doc, tags, lx, res.tagset)});
    }
    if (cfg.scored_lex) {
        if (res.scored.empty())
            throw DataError("feature family 'scored_lex' enabled but no score lexicon loaded");
        for (const auto& lx : res.scored)
            fb.dense.push_back({"scored:" + lx.name, lex::scored_features(doc, lx)});
    }
    if (cfg.pos) {
        if (res.tagset.empty()) throw DataError("feature family 'pos' enabled but tagset is empty");
        if (tags)
            fb.dense.push_back({"pos", pos_counts(*tags, doc, res.tagset)});
        else
            fb.dense.push_back({"pos", std::vector<double>(2 * res.tagset.size(), 0.0)});
    }
    if (cfg.embeddings) {
        if (!res.embeddings || res.embeddings->dim == 0)
            throw DataError("feature family 'embeddings' enabled but no embedding table loaded");
        fb.dense.push_back({"embed", embed_compose(doc, *res.embeddings)});
    }
    return fb;
}

}  // namespace sentikit::feat
