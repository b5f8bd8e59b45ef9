// Sentiment lexicon loaders (manual word lists, score lexicons, word
// clusters) and the context-partitioned lexicon feature blocks, including
// the 104-dimensional per-lexicon scheme.
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sentikit/common.hpp"
#include "sentikit/text.hpp"

namespace sentikit::lex {

struct ManualLexicon {
    std::string name;
    std::set<std::string> positive;  // lowercase forms
    std::set<std::string> negative;  // may overlap with positive (MPQA allows both)
};

struct ScoredLexicon {
    std::string name;
    std::map<std::string, double> scores;

    std::optional<double> lookup(const std::string& word) const {
        auto it = scores.find(word);
        if (it == scores.end()) return std::nullopt;
        return it->second;
    }
};

struct ClusterMap {
    std::map<std::string, std::string> clusters;  // word -> bit-string path
};

// POS tags aligned 1:1 with the tokens of one document.
struct PosTagging {
    std::vector<std::string> tags;
};

// The 24-symbol Twitter tagset; order defines the tag-block layout.
inline std::vector<std::string> default_tagset() {
    return {"N", "O", "S", "^", "Z", "L", "M", "V", "A", "R", "!", "D",
            "P", "&", "T", "X", "Y", "#", "@", "~", "U", "E", "$", ","};
}

inline constexpr size_t kTagsetSize = 24;

inline std::vector<std::string> load_tagset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open tagset file: " + path);
    std::vector<std::string> tags;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty()) continue;
        tags.emplace_back(t);
    }
    if (tags.size() != kTagsetSize)
        throw DataError("tagset file " + path + " must list exactly " + std::to_string(kTagsetSize) +
                        " tags, got " + std::to_string(tags.size()));
    return tags;
}

// ---- loaders ------------------------------------------------------------

namespace detail {

inline void insert_words(std::istream& in, std::set<std::string>& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty() || t.front() == ';' || t.front() == '#') continue;
        out.insert(str::lower(t));
    }
}

}  // namespace detail

// Two plain word-list files, one per polarity.
inline ManualLexicon load_bingliu_pair(const std::string& pos_path, const std::string& neg_path,
                                       const std::string& name = "bingliu") {
    ManualLexicon lx;
    lx.name = name;
    std::ifstream pin(pos_path);
    if (!pin) throw DataError("cannot open lexicon file: " + pos_path);
    detail::insert_words(pin, lx.positive);
    std::ifstream nin(neg_path);
    if (!nin) throw DataError("cannot open lexicon file: " + neg_path);
    detail::insert_words(nin, lx.negative);
    return lx;
}

// MPQA subjectivity clues: `key=value` fields per line, of which we use
// `word1=` and `priorpolarity=`. Polarity "both" lands in both sets,
// "neutral" in neither.
inline ManualLexicon load_mpqa(std::istream& in, const std::string& name = "mpqa") {
    ManualLexicon lx;
    lx.name = name;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::string word, polarity;
        for (const auto& field : str::split(std::string(t), ' ')) {
            auto eq = field.find('=');
            if (eq == std::string::npos) continue;
            auto key = field.substr(0, eq);
            auto value = field.substr(eq + 1);
            if (key == "word1") word = str::lower(value);
            else if (key == "priorpolarity") polarity = str::lower(value);
        }
        if (word.empty()) continue;
        if (polarity == "positive") lx.positive.insert(word);
        else if (polarity == "negative") lx.negative.insert(word);
        else if (polarity == "both") {
            lx.positive.insert(word);
            lx.negative.insert(word);
        } else if (polarity == "neutral" || polarity == "weakneg") {
            // weakneg appears in some releases; treated as neither
        } else {
            throw DataError("mpqa line " + std::to_string(line_no) + ": unknown priorpolarity '" +
                            polarity + "'");
        }
    }
    return lx;
}

inline ManualLexicon load_mpqa(const std::string& path, const std::string& name = "mpqa") {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file: " + path);
    return load_mpqa(in, name);
}

// Emotion-association lexicon: `word<TAB>affect<TAB>{0,1}`. Only the
// positive/negative affect rows are used; the emotion rows are skipped.
inline ManualLexicon load_nrc_emotion(std::istream& in, const std::string& name = "nrc") {
    ManualLexicon lx;
    lx.name = name;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto fields = str::split(std::string(t), '\t');
        if (fields.size() != 3)
            throw DataError("nrc line " + std::to_string(line_no) + ": expected 3 fields");
        if (fields[2] != "1") continue;
        std::string affect = str::lower(fields[1]);
        if (affect == "positive") lx.positive.insert(str::lower(fields[0]));
        else if (affect == "negative") lx.negative.insert(str::lower(fields[0]));
    }
    return lx;
}

inline ManualLexicon load_nrc_emotion(const std::string& path, const std::string& name = "nrc") {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file: " + path);
    return load_nrc_emotion(in, name);
}

// Score lexicon: `term<TAB>score[<TAB>...]`, extra columns ignored.
inline ScoredLexicon load_scored(std::istream& in, const std::string& name) {
    ScoredLexicon lx;
    lx.name = name;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto fields = str::split(std::string(t), '\t');
        if (fields.size() < 2)
            throw DataError(name + " line " + std::to_string(line_no) + ": expected term<TAB>score");
        try {
            double score = std::stod(fields[1]);
            if (!std::isfinite(score))
                throw DataError(name + " line " + std::to_string(line_no) + ": non-finite score");
            lx.scores[str::lower(fields[0])] = score;
        } catch (const std::invalid_argument&) {
            throw DataError(name + " line " + std::to_string(line_no) + ": bad score '" + fields[1] + "'");
        }
    }
    return lx;
}

inline ScoredLexicon load_scored(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file: " + path);
    return load_scored(in, name);
}

// Word clusters: `path<TAB>word[<TAB>count]` per line (the Twitter NLP
// distribution format).
inline ClusterMap load_clusters(std::istream& in) {
    ClusterMap cm;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty()) continue;
        auto fields = str::split(std::string(t), '\t');
        if (fields.size() < 2)
            throw DataError("clusters line " + std::to_string(line_no) + ": expected path<TAB>word");
        cm.clusters[str::lower(fields[1])] = fields[0];
    }
    return cm;
}

inline ClusterMap load_clusters(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open cluster file: " + path);
    return load_clusters(in);
}

// ---- feature blocks ------------------------------------------------------

// Per-(context, polarity) counting slots, in layout order:
//   0 (affirmative, positive)   1 (affirmative, negative)
//   2 (negated, positive)       3 (negated, negative)
namespace detail {

inline void count_membership(const ManualLexicon& lx, const std::string& word, bool negated,
                             double* quad) {
    if (lx.positive.count(word)) quad[negated ? 2 : 0] += 1.0;
    if (lx.negative.count(word)) quad[negated ? 3 : 1] += 1.0;
}

}  // namespace detail

inline constexpr size_t kManualFeatureSize = 104;  // 2 token families * 4 + 24 tags * 4

// The 104-value lexicon block for one manual lexicon:
//   [0..3]   word tokens, matched case-insensitively on the lowered form
//   [4..7]   hashtag tokens ('#' stripped before lookup)
//   [8..]    per POS tag in tagset order, 4 context x polarity counts over
//            word tokens carrying that tag (zeros when tags are absent)
inline std::vector<double> manual_features(const text::TokenizedDoc& doc,
                                           const PosTagging* tags,
                                           const ManualLexicon& lx,
                                           const std::vector<std::string>& tagset = default_tagset()) {
    if (tags && tags->tags.size() != doc.tokens.size())
        throw DataError("POS tags misaligned: " + std::to_string(tags->tags.size()) + " tags for " +
                        std::to_string(doc.tokens.size()) + " tokens");
    if (tagset.size() != kTagsetSize)
        throw DataError("tagset must have " + std::to_string(kTagsetSize) + " entries");
    std::vector<double> out(8 + 4 * tagset.size(), 0.0);
    std::map<std::string, size_t> tag_index;
    for (size_t i = 0; i < tagset.size(); ++i) tag_index[tagset[i]] = i;

    for (size_t i = 0; i < doc.tokens.size(); ++i) {
        const text::Token& t = doc.tokens[i];
        if (t.kind == text::TokenKind::word) {
            detail::count_membership(lx, t.lowered, t.negated, &out[0]);
            if (tags) {
                auto it = tag_index.find(tags->tags[i]);
                if (it != tag_index.end())
                    detail::count_membership(lx, t.lowered, t.negated, &out[8 + 4 * it->second]);
            }
        } else if (t.kind == text::TokenKind::hashtag && t.lowered.size() > 1) {
            detail::count_membership(lx, t.lowered.substr(1), t.negated, &out[4]);
        }
    }
    return out;
}

inline constexpr size_t kScoredFeatureSize = 8;

// Aggregate statistics of a score lexicon over word tokens, split by
// negation context. Per context: count of tokens with score > 0, sum of
// found scores, max found score, and the score of the last token with a
// positive score (all 0 when nothing matches).
inline std::vector<double> scored_features(const text::TokenizedDoc& doc, const ScoredLexicon& lx) {
    std::vector<double> out(kScoredFeatureSize, 0.0);
    bool any[2] = {false, false};
    for (const text::Token& t : doc.tokens) {
        if (t.kind != text::TokenKind::word) continue;
        auto score = lx.lookup(t.lowered);
        if (!score) continue;
        size_t base = t.negated ? 4 : 0;
        size_t ctx = t.negated ? 1 : 0;
        if (*score > 0) {
            out[base + 0] += 1.0;
            out[base + 3] = *score;  // last token with positive score
        }
        out[base + 1] += *score;
        out[base + 2] = any[ctx] ? std::max(out[base + 2], *score) : *score;
        any[ctx] = true;
    }
    return out;
}

// Word-cluster counts keyed by (cluster id, negation context); feeds the
// hashing vectorizer as categorical features.
inline std::map<std::string, double> cluster_features(const text::TokenizedDoc& doc, const ClusterMap& cm) {
    std::map<std::string, double> out;
    for (const text::Token& t : doc.tokens) {
        if (t.kind != text::TokenKind::word) continue;
        auto it = cm.clusters.find(t.lowered);
        if (it == cm.clusters.end()) continue;
        out["cl:" + it->second + (t.negated ? "|neg" : "|aff")] += 1.0;
    }
    return out;
}

}  // namespace sentikit::lex
