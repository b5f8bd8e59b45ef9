// Dataset parsing for the tab-separated task formats, label taxonomies for
// the three-class / two-class / five-point subtasks, and prediction files.
#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sentikit/common.hpp"

namespace sentikit::corpus {

enum class Label3 { Positive, Negative, Neutral };
enum class Label2 { Positive, Negative };
// Five-point scale labels are plain integers in [-2, 2]; |a-b| is the error unit.
using Label5 = int;

enum class Schema { A, BD, CE };

inline std::string schema_name(Schema s) {
    switch (s) {
        case Schema::A: return "A";
        case Schema::BD: return "BD";
        case Schema::CE: return "CE";
    }
    return "?";
}

// Canonical label strings used throughout the pipeline. Class order below is
// the declaration order used for deterministic tie-breaking.
inline const std::vector<std::string>& classes3() {
    static const std::vector<std::string> c{"positive", "negative", "neutral"};
    return c;
}
inline const std::vector<std::string>& classes2() {
    static const std::vector<std::string> c{"positive", "negative"};
    return c;
}
inline const std::vector<std::string>& classes5() {
    static const std::vector<std::string> c{"-2", "-1", "0", "1", "2"};
    return c;
}

inline std::string to_string(Label3 l) {
    switch (l) {
        case Label3::Positive: return "positive";
        case Label3::Negative: return "negative";
        case Label3::Neutral: return "neutral";
    }
    return "?";
}
inline std::string to_string(Label2 l) { return l == Label2::Positive ? "positive" : "negative"; }

inline std::optional<Label3> parse_label3(std::string_view raw) {
    std::string s = str::lower(str::trim(raw));
    if (s == "positive") return Label3::Positive;
    if (s == "negative") return Label3::Negative;
    if (s == "neutral") return Label3::Neutral;
    return std::nullopt;
}

inline std::optional<Label2> parse_label2(std::string_view raw) {
    std::string s = str::lower(str::trim(raw));
    if (s == "positive") return Label2::Positive;
    if (s == "negative") return Label2::Negative;
    return std::nullopt;
}

inline std::optional<Label5> parse_label5(std::string_view raw) {
    std::string_view s = str::trim(raw);
    if (s.empty()) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    if (value < -2 || value > 2) return std::nullopt;
    return value;
}

// Normalizes a raw label field to its canonical string for the schema,
// or nullopt when it does not parse.
inline std::optional<std::string> canonical_label(std::string_view raw, Schema schema) {
    switch (schema) {
        case Schema::A:
            if (auto l = parse_label3(raw)) return to_string(*l);
            return std::nullopt;
        case Schema::BD:
            if (auto l = parse_label2(raw)) return to_string(*l);
            return std::nullopt;
        case Schema::CE:
            if (auto l = parse_label5(raw)) return std::to_string(*l);
            return std::nullopt;
    }
    return std::nullopt;
}

inline const std::vector<std::string>& classes_for(Schema schema) {
    switch (schema) {
        case Schema::A: return classes3();
        case Schema::BD: return classes2();
        case Schema::CE: return classes5();
    }
    return classes3();
}

struct Record {
    std::string id;
    std::optional<std::string> topic;
    std::optional<std::string> label;  // canonical form, see canonical_label()
    std::string text;
};

struct Dataset {
    Schema schema = Schema::A;
    std::vector<Record> records;
    // Rows whose text was the distribution placeholder for an undownloaded
    // tweet; they are dropped at load time and only counted.
    size_t skipped_unavailable = 0;

    size_t size() const { return records.size(); }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        out.reserve(records.size());
        for (const auto& r : records) {
            if (!r.label) throw DataError("record '" + r.id + "' has no gold label");
            out.push_back(*r.label);
        }
        return out;
    }
};

inline constexpr const char* kUnavailableText = "Not Available";

namespace detail {

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

// Parses one dataset line. Column layout per schema:
//   A : id <TAB> label <TAB> text
//   BD: id <TAB> topic <TAB> label <TAB> text   (label in {positive, negative})
//   CE: id <TAB> topic <TAB> label <TAB> text   (label an integer in [-2, 2])
// The text field is last and keeps any further tab characters.
inline std::optional<Record> parse_record(const std::string& line, Schema schema, size_t line_no) {
    const size_t n_fields = (schema == Schema::A) ? 3 : 4;
    auto fields = str::split_limit(line, '\t', n_fields);
    if (fields.size() != n_fields)
        throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(n_fields) +
                        " tab-separated fields, got " + std::to_string(fields.size()));

    Record rec;
    rec.id = std::string(str::trim(fields[0]));
    if (rec.id.empty()) throw DataError("line " + std::to_string(line_no) + ": empty id");

    size_t label_idx = 1;
    if (schema != Schema::A) {
        rec.topic = std::string(str::trim(fields[1]));
        label_idx = 2;
    }
    const std::string& raw_text = fields[label_idx + 1];
    if (str::trim(raw_text) == kUnavailableText) return std::nullopt;
    rec.text = raw_text;
    if (str::trim(rec.text).empty())
        throw DataError("line " + std::to_string(line_no) + ": empty text");

    auto label = canonical_label(fields[label_idx], schema);
    if (!label)
        throw DataError("line " + std::to_string(line_no) + ": unknown label '" + fields[label_idx] +
                        "' for schema " + schema_name(schema));
    rec.label = *label;
    return rec;
}

inline Dataset load_dataset(std::istream& in, Schema schema) {
    Dataset ds;
    ds.schema = schema;
    std::set<std::string> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (str::trim(line).empty()) continue;
        auto rec = parse_record(line, schema, line_no);
        if (!rec) {
            ++ds.skipped_unavailable;
            continue;
        }
        if (!seen_ids.insert(rec->id).second)
            throw DataError("line " + std::to_string(line_no) + ": duplicate id '" + rec->id + "'");
        ds.records.push_back(std::move(*rec));
    }
    return ds;
}

inline Dataset load_dataset(const std::string& path, Schema schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    try {
        return load_dataset(in, schema);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

// Prediction lines: `id<TAB>label` for schema A, `id<TAB>topic<TAB>label`
// otherwise, one line per record in input order.
inline void write_predictions(const Dataset& ds, const std::vector<std::string>& labels,
                              std::ostream& out) {
    if (labels.size() != ds.records.size())
        throw DataError("prediction count " + std::to_string(labels.size()) +
                        " does not match record count " + std::to_string(ds.records.size()));
    for (size_t i = 0; i < ds.records.size(); ++i) {
        const Record& r = ds.records[i];
        out << r.id << '\t';
        if (ds.schema != Schema::A) out << (r.topic ? *r.topic : "") << '\t';
        out << labels[i] << '\n';
    }
}

inline void write_predictions(const Dataset& ds, const std::vector<std::string>& labels,
                              const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    write_predictions(ds, labels, out);
}

struct Prediction {
    std::string id;
    std::optional<std::string> topic;
    std::string label;
};

// Reads a prediction file back. Accepts both the 2-column and 3-column layouts.
inline std::vector<Prediction> load_predictions(std::istream& in, Schema schema) {
    std::vector<Prediction> preds;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_cr(line);
        if (str::trim(line).empty()) continue;
        auto fields = str::split(line, '\t');
        Prediction p;
        std::string raw_label;
        if (fields.size() == 2) {
            p.id = fields[0];
            raw_label = fields[1];
        } else if (fields.size() == 3) {
            p.id = fields[0];
            p.topic = fields[1];
            raw_label = fields[2];
        } else {
            throw DataError("prediction line " + std::to_string(line_no) + ": expected 2 or 3 fields");
        }
        auto label = canonical_label(raw_label, schema);
        if (!label)
            throw DataError("prediction line " + std::to_string(line_no) + ": unknown label '" +
                            raw_label + "'");
        p.label = *label;
        preds.push_back(std::move(p));
    }
    return preds;
}

inline std::vector<Prediction> load_predictions(const std::string& path, Schema schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open prediction file: " + path);
    try {
        return load_predictions(in, schema);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace sentikit::corpus
