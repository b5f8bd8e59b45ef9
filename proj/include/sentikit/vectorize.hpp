// Fixed-dimension vectorization of feature bundles: signed feature hashing,
// the alpha-power count transform, a tf-idf baseline, and per-feature
// max-abs scaling of the dense engineered blocks.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sentikit/common.hpp"
#include "sentikit/features.hpp"

namespace sentikit::vec {

// Seeded FNV-1a over the key bytes. FNV is public, byte-order free and
// trivially reproducible across platforms, which pins model artifacts.
inline uint64_t hash64(std::string_view key, uint64_t seed) {
    uint64_t h = 14695981039346656037ULL ^ (seed * 0x9e3779b97f4a7c15ULL);
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct HashSpec {
    uint32_t dim = 1u << 18;
    uint64_t seed = 1;
    bool sign_hash = true;

    void validate() const {
        if (dim < (1u << 10) || (dim & (dim - 1)) != 0)
            throw DataError("hash dimension must be a power of two >= 1024");
    }

    uint32_t index(std::string_view key) const { return static_cast<uint32_t>(hash64(key, seed) & (dim - 1)); }

    double sign(std::string_view key) const {
        if (!sign_hash) return 1.0;
        return (hash64(key, seed ^ 0xa5a5a5a5a5a5a5a5ULL) >> 63) ? -1.0 : 1.0;
    }
};

// Hashes a bundle's categorical multiset into a sparse vector; colliding
// keys sum. Keys are accumulated in lexicographic order so the floating
// point result is identical on every run.
inline SparseVec hash_vectorize(const feat::FeatureBundle& bundle, const HashSpec& spec) {
    spec.validate();
    std::map<uint32_t, double> acc;
    for (const auto& [key, count] : bundle.categorical)
        acc[spec.index(key)] += spec.sign(key) * count;
    SparseVec out;
    out.entries.reserve(acc.size());
    for (const auto& [i, v] : acc)
        if (v != 0.0) out.push(i, v);
    return out;
}

// Elementwise sign(x) * |x|^alpha; identity at alpha = 1.
inline void alpha_power_inplace(SparseVec& x, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw DataError("alpha must lie in (0, 1]");
    if (alpha == 1.0) return;
    for (auto& [i, v] : x.entries) {
        double mag = std::pow(std::abs(v), alpha);
        v = v < 0 ? -mag : mag;
    }
}

inline SparseVec alpha_power(SparseVec x, double alpha) {
    alpha_power_inplace(x, alpha);
    return x;
}

inline std::vector<double> alpha_power(std::vector<double> x, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw DataError("alpha must lie in (0, 1]");
    for (double& v : x) {
        double mag = std::pow(std::abs(v), alpha);
        v = v < 0 ? -mag : mag;
    }
    return x;
}

// ---- tf-idf baseline -------------------------------------------------------

struct TfidfTable {
    size_t n_docs = 0;
    std::map<std::string, size_t> df;

    bool fitted() const { return n_docs > 0; }

    // Smoothed idf; unseen terms get the df = 0 slot.
    double idf(const std::string& key) const {
        auto it = df.find(key);
        size_t d = it == df.end() ? 0 : it->second;
        return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(d))) + 1.0;
    }
};

inline TfidfTable tfidf_fit(const std::vector<feat::FeatureBundle>& corpus) {
    TfidfTable table;
    table.n_docs = corpus.size();
    for (const auto& fb : corpus)
        for (const auto& [key, count] : fb.categorical)
            if (count > 0) ++table.df[key];
    return table;
}

inline SparseVec tfidf_apply(const feat::FeatureBundle& bundle, const TfidfTable& table,
                             const HashSpec& spec) {
    if (!table.fitted()) throw DataError("tf-idf table applied before fit");
    spec.validate();
    std::map<uint32_t, double> acc;
    for (const auto& [key, count] : bundle.categorical)
        acc[spec.index(key)] += spec.sign(key) * count * table.idf(key);
    SparseVec out;
    out.entries.reserve(acc.size());
    for (const auto& [i, v] : acc)
        if (v != 0.0) out.push(i, v);
    return out;
}

// ---- full vectorizer -------------------------------------------------------

enum class Weighting { alpha_power, tfidf };

struct VectorizeOptions {
    HashSpec hash;
    double alpha = 1.0;
    Weighting weighting = Weighting::alpha_power;
};

struct DenseScale {
    std::string name;
    std::vector<double> scale;  // per-feature max-abs over the fit corpus, 0 -> 1
};

// Frozen after fit. Transform layout: hashed block at [0, dim), dense
// engineered blocks appended after it in layout order. The hashed block is
// alpha-power (or tf-idf) weighted and L2-normalized; dense features are
// max-abs scaled with factors fit on the training corpus.
class Vectorizer {
public:
    Vectorizer() = default;
    explicit Vectorizer(VectorizeOptions opts) : opts_(opts) { opts_.hash.validate(); }

    void fit(const std::vector<feat::FeatureBundle>& corpus) {
        layout_.clear();
        if (!corpus.empty()) {
            for (const auto& block : corpus.front().dense)
                layout_.push_back({block.name, std::vector<double>(block.values.size(), 0.0)});
            for (const auto& fb : corpus) {
                check_layout(fb);
                for (size_t b = 0; b < fb.dense.size(); ++b)
                    for (size_t j = 0; j < fb.dense[b].values.size(); ++j)
                        layout_[b].scale[j] = std::max(layout_[b].scale[j], std::abs(fb.dense[b].values[j]));
            }
            for (auto& block : layout_)
                for (double& s : block.scale)
                    if (s == 0.0) s = 1.0;
        }
        if (opts_.weighting == Weighting::tfidf) idf_ = tfidf_fit(corpus);
        fitted_ = true;
    }

    SparseVec transform(const feat::FeatureBundle& fb) const {
        if (!fitted_) throw DataError("vectorizer used before fit");
        check_layout(fb);
        SparseVec hashed = opts_.weighting == Weighting::tfidf ? tfidf_apply(fb, idf_, opts_.hash)
                                                               : hash_vectorize(fb, opts_.hash);
        if (opts_.weighting == Weighting::alpha_power) alpha_power_inplace(hashed, opts_.alpha);
        double norm = hashed.l2_norm();
        if (norm > 0)
            for (auto& [i, v] : hashed.entries) v /= norm;

        uint32_t offset = opts_.hash.dim;
        for (size_t b = 0; b < fb.dense.size(); ++b) {
            const auto& values = fb.dense[b].values;
            for (size_t j = 0; j < values.size(); ++j) {
                double v = values[j] / layout_[b].scale[j];
                if (v != 0.0) hashed.push(offset + static_cast<uint32_t>(j), v);
            }
            offset += static_cast<uint32_t>(values.size());
        }
        return hashed;  // hashed entries already sorted; dense appended in order
    }

    size_t total_dim() const {
        size_t n = opts_.hash.dim;
        for (const auto& b : layout_) n += b.scale.size();
        return n;
    }

    const VectorizeOptions& options() const { return opts_; }
    const std::vector<DenseScale>& layout() const { return layout_; }
    const TfidfTable& idf() const { return idf_; }
    bool fitted() const { return fitted_; }

    // Used by deserialization.
    void restore(VectorizeOptions opts, std::vector<DenseScale> layout, TfidfTable idf) {
        opts_ = opts;
        layout_ = std::move(layout);
        idf_ = std::move(idf);
        fitted_ = true;
    }

private:
    void check_layout(const feat::FeatureBundle& fb) const {
        if (fb.dense.size() != layout_.size())
            throw DataError("feature bundle has " + std::to_string(fb.dense.size()) +
                            " dense blocks, vectorizer expects " + std::to_string(layout_.size()));
        for (size_t b = 0; b < layout_.size(); ++b)
            if (fb.dense[b].name != layout_[b].name || fb.dense[b].values.size() != layout_[b].scale.size())
                throw DataError("dense block mismatch at '" + layout_[b].name + "'");
    }

    VectorizeOptions opts_;
    std::vector<DenseScale> layout_;
    TfidfTable idf_;
    bool fitted_ = false;
};

}  // namespace sentikit::vec
