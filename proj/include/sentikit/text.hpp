// Tweet-aware tokenization (emoticons, URLs, mentions, hashtags and
// punctuation runs kept whole), negation-context marking, and surface
// statistics.
#pragma once

#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sentikit/common.hpp"

namespace sentikit::text {

enum class TokenKind { word, hashtag, mention, url, emoticon, punctuation, number, other };

struct Token {
    std::string surface;
    std::string lowered;  // ASCII-lowercased surface
    bool negated = false;
    TokenKind kind = TokenKind::other;
};

struct TokenizedDoc {
    std::string raw;
    std::vector<Token> tokens;
    // Number of negation scopes opened by mark_negation (0 before marking).
    size_t negation_scopes = 0;

    size_t size() const { return tokens.size(); }
};

// Default negator list. Words ending in "n't" are matched by suffix as well,
// since the tokenizer keeps clitics attached ("don't", "isn't", ...).
inline const std::set<std::string>& default_negators() {
    static const std::set<std::string> negators{
        "not", "no", "never", "nothing", "nobody", "none", "cannot",
    };
    return negators;
}

// Built-in emoticon polarity tables; both can be overridden from files.
inline const std::set<std::string>& default_positive_emoticons() {
    static const std::set<std::string> table{
        ":)",  ":-)", ":]",  ":-]", ":}",  "=)",  "=]",  ";)",  ";-)", ";]",
        ":d",  ":-d", "=d",  ";d",  ":p",  ":-p", "=p",  ":b",  "(:",  "(-:",
        "(=",  "[:",  "<3",
    };
    return table;
}

inline const std::set<std::string>& default_negative_emoticons() {
    static const std::set<std::string> table{
        ":(",  ":-(", ":[",  ":-[", ":{",  "=(",  "=[",  "):",  ")-:", ")=",
        "]:",  "d:",  "d-:", ":'(", ":\"(", ">:(", "</3",
    };
    return table;
}

struct EmoticonTable {
    std::set<std::string> positive = default_positive_emoticons();
    std::set<std::string> negative = default_negative_emoticons();
};

// One entry per line, '#' comments and blank lines skipped.
inline std::set<std::string> load_word_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open word list: " + path);
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = str::trim(line);
        if (t.empty() || t.front() == '#') continue;
        words.insert(str::lower(t));
    }
    return words;
}

namespace detail {

inline bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_utf8_cont(char c) { return static_cast<unsigned char>(c) >= 0x80; }
inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline bool is_word_start(char c) { return is_ascii_letter(c) || c == '_' || is_utf8_cont(c); }
inline bool is_word_char(char c) {
    return is_ascii_letter(c) || is_digit(c) || c == '_' || c == '\'' || c == '-' || is_utf8_cont(c);
}

// Western-style emoticons, matched at `pos`:
//   forward : [<>]? eyes [-o*'^]? mouth+           e.g. :-) ;D =((
//   reverse : mouth [-o*'^]? eyes [<>]?            e.g. (: )-:
//   hearts  : <3+  </3
inline size_t match_emoticon(std::string_view s, size_t pos) {
    static const std::string_view eyes = ":;=8";
    static const std::string_view nose = "-o*'^";
    static const std::string_view mouth = ")(][dDpPb/}{@|\\";
    auto in = [](std::string_view set, char c) { return set.find(c) != std::string_view::npos; };

    // hearts
    if (s[pos] == '<') {
        size_t i = pos + 1;
        if (i < s.size() && s[i] == '/') ++i;
        size_t hearts = 0;
        while (i < s.size() && s[i] == '3') ++i, ++hearts;
        if (hearts > 0) return i - pos;
    }

    // forward
    {
        size_t i = pos;
        if (i < s.size() && (s[i] == '<' || s[i] == '>')) ++i;
        if (i < s.size() && in(eyes, s[i])) {
            ++i;
            if (i < s.size() && in(nose, s[i]) && i + 1 < s.size() && in(mouth, s[i + 1])) ++i;
            size_t mouths = 0;
            while (i < s.size() && in(mouth, s[i])) ++i, ++mouths;
            if (mouths > 0) return i - pos;
        }
    }

    // reverse
    {
        static const std::string_view rmouth = ")(][dD}{";
        size_t i = pos;
        if (in(rmouth, s[i])) {
            ++i;
            size_t save = i;
            if (i < s.size() && in(nose, s[i])) ++i;
            if (i < s.size() && in(eyes, s[i])) {
                ++i;
                if (i < s.size() && (s[i] == '<' || s[i] == '>')) ++i;
                return i - pos;
            }
            i = save;
            if (i < s.size() && in(eyes, s[i])) {
                ++i;
                if (i < s.size() && (s[i] == '<' || s[i] == '>')) ++i;
                return i - pos;
            }
        }
    }
    return 0;
}

inline size_t match_url(std::string_view s, size_t pos) {
    auto starts = [&](std::string_view prefix) {
        if (pos + prefix.size() > s.size()) return false;
        for (size_t k = 0; k < prefix.size(); ++k)
            if (std::tolower(static_cast<unsigned char>(s[pos + k])) != prefix[k]) return false;
        return true;
    };
    if (!starts("http://") && !starts("https://") && !starts("www.")) return 0;
    size_t i = pos;
    while (i < s.size() && !is_space(s[i])) ++i;
    return i - pos;
}

// [+-]? digits ( [,./:-] digits )*  with optional trailing '%'
inline size_t match_number(std::string_view s, size_t pos) {
    size_t i = pos;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (i >= s.size() || !is_digit(s[i])) return 0;
    while (i < s.size() && is_digit(s[i])) ++i;
    for (;;) {
        if (i + 1 < s.size() && (s[i] == ',' || s[i] == '.' || s[i] == '/' || s[i] == ':' || s[i] == '-') &&
            is_digit(s[i + 1])) {
            i += 2;
            while (i < s.size() && is_digit(s[i])) ++i;
        } else {
            break;
        }
    }
    if (i < s.size() && s[i] == '%') ++i;
    return i - pos;
}

inline size_t match_word(std::string_view s, size_t pos) {
    if (!is_word_start(s[pos])) return 0;
    size_t i = pos;
    while (i < s.size() && is_word_char(s[i])) ++i;
    // words do not end in apostrophes or dashes
    while (i > pos && (s[i - 1] == '\'' || s[i - 1] == '-')) --i;
    return i - pos;
}

}  // namespace detail

// Tokenizes a tweet. Emoticons, URLs, @mentions, #hashtags and punctuation
// runs survive as single tokens; `lowered` carries the ASCII-lowercased
// surface. Total function: the empty string yields an empty token list.
inline TokenizedDoc tokenize(std::string_view raw) {
    using namespace detail;
    TokenizedDoc doc;
    doc.raw = std::string(raw);
    size_t i = 0;
    const size_t n = raw.size();
    auto emit = [&](size_t len, TokenKind kind) {
        Token t;
        t.surface = std::string(raw.substr(i, len));
        t.lowered = str::lower(t.surface);
        t.kind = kind;
        doc.tokens.push_back(std::move(t));
        i += len;
    };
    while (i < n) {
        if (is_space(raw[i])) {
            ++i;
            continue;
        }
        if (size_t len = match_url(raw, i)) {
            emit(len, TokenKind::url);
            continue;
        }
        if (size_t len = match_emoticon(raw, i)) {
            emit(len, TokenKind::emoticon);
            continue;
        }
        if (raw[i] == '@' && i + 1 < n && (is_ascii_letter(raw[i + 1]) || is_digit(raw[i + 1]) || raw[i + 1] == '_')) {
            size_t j = i + 1;
            while (j < n && (is_ascii_letter(raw[j]) || is_digit(raw[j]) || raw[j] == '_')) ++j;
            emit(j - i, TokenKind::mention);
            continue;
        }
        if (raw[i] == '#' && i + 1 < n && detail::is_word_start(raw[i + 1])) {
            size_t j = i + 1;
            while (j < n && detail::is_word_char(raw[j])) ++j;
            while (j > i + 1 && (raw[j - 1] == '\'' || raw[j - 1] == '-')) --j;
            emit(j - i, TokenKind::hashtag);
            continue;
        }
        if (size_t len = match_number(raw, i)) {
            emit(len, TokenKind::number);
            continue;
        }
        if (size_t len = match_word(raw, i)) {
            emit(len, TokenKind::word);
            continue;
        }
        // Punctuation run: consume non-space, non-word characters until a
        // position where a higher-priority pattern would start.
        {
            size_t j = i;
            while (j < n && !is_space(raw[j]) && !is_word_start(raw[j]) && !is_digit(raw[j])) {
                if (j > i) {
                    if (match_emoticon(raw, j) || match_url(raw, j)) break;
                    if ((raw[j] == '@' || raw[j] == '#') && j + 1 < n && is_word_start(raw[j + 1])) break;
                }
                ++j;
            }
            if (j == i) ++j;  // lone unclassifiable byte
            emit(j - i, TokenKind::punctuation);
        }
    }
    return doc;
}

inline bool is_negator(const Token& t, const std::set<std::string>& negators) {
    if (t.kind != TokenKind::word) return false;
    if (negators.count(t.lowered)) return true;
    return t.lowered.size() > 3 && t.lowered.ends_with("n't");
}

// Marks every word token strictly after a negator and before the next
// punctuation token as negated. Negators themselves and non-word tokens
// stay unflagged; a scope also terminates at the end of the tweet.
inline TokenizedDoc mark_negation(TokenizedDoc doc, const std::set<std::string>& negators = default_negators()) {
    if (negators.empty()) throw DataError("negator set must be non-empty");
    bool in_scope = false;
    doc.negation_scopes = 0;
    for (Token& t : doc.tokens) {
        t.negated = false;
        if (t.kind == TokenKind::punctuation) {
            in_scope = false;
            continue;
        }
        if (is_negator(t, negators)) {
            if (!in_scope) ++doc.negation_scopes;
            in_scope = true;
            continue;
        }
        if (in_scope && t.kind == TokenKind::word) t.negated = true;
    }
    return doc;
}

struct SurfaceStats {
    int exclamations = 0;       // '!' characters in punctuation tokens
    int questions = 0;          // '?' characters in punctuation tokens
    int mixed_runs = 0;         // punctuation tokens containing both '!' and '?'
    int capitalized_words = 0;  // all-letter uppercase word tokens, length >= 2
    int elongated_words = 0;    // word tokens with a character repeated >= 3 times
    int negated_contexts = 0;   // negation scopes opened by mark_negation
    int positive_emoticons = 0;
    int negative_emoticons = 0;
    int has_emoticon = 0;  // 1 iff any emoticon token is present

    std::vector<double> as_vector() const {
        return {static_cast<double>(exclamations),      static_cast<double>(questions),
                static_cast<double>(mixed_runs),        static_cast<double>(capitalized_words),
                static_cast<double>(elongated_words),   static_cast<double>(negated_contexts),
                static_cast<double>(positive_emoticons), static_cast<double>(negative_emoticons),
                static_cast<double>(has_emoticon)};
    }
};

inline bool is_all_caps(std::string_view surface) {
    if (surface.size() < 2) return false;
    for (char c : surface)
        if (c < 'A' || c > 'Z') return false;
    return true;
}

inline bool is_elongated(std::string_view surface) {
    size_t run = 1;
    for (size_t i = 1; i < surface.size(); ++i) {
        run = (surface[i] == surface[i - 1]) ? run + 1 : 1;
        if (run >= 3) return true;
    }
    return false;
}

inline SurfaceStats surface_stats(const TokenizedDoc& doc, const EmoticonTable& emoticons = EmoticonTable{}) {
    SurfaceStats s;
    s.negated_contexts = static_cast<int>(doc.negation_scopes);
    for (const Token& t : doc.tokens) {
        switch (t.kind) {
            case TokenKind::punctuation: {
                bool has_ex = false, has_q = false;
                for (char c : t.surface) {
                    if (c == '!') ++s.exclamations, has_ex = true;
                    if (c == '?') ++s.questions, has_q = true;
                }
                if (has_ex && has_q) ++s.mixed_runs;
                break;
            }
            case TokenKind::word:
                if (is_all_caps(t.surface)) ++s.capitalized_words;
                if (is_elongated(t.surface)) ++s.elongated_words;
                break;
            case TokenKind::emoticon: {
                s.has_emoticon = 1;
                // ":)))" and "<333" count like their collapsed forms
                std::string canon;
                for (char c : t.lowered)
                    if (canon.empty() || canon.back() != c) canon.push_back(c);
                if (emoticons.positive.count(t.lowered) || emoticons.positive.count(canon))
                    ++s.positive_emoticons;
                else if (emoticons.negative.count(t.lowered) || emoticons.negative.count(canon))
                    ++s.negative_emoticons;
                break;
            }
            default:
                break;
        }
    }
    return s;
}

}  // namespace sentikit::text
