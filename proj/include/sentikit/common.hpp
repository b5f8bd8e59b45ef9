// Shared plumbing: error taxonomy, string helpers, sparse vectors,
// deterministic RNG utilities and a small parallel-for.
#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace sentikit {

// Error categories map 1:1 onto CLI exit codes (usage=1, data=2, convergence=3).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg, double grad_norm = 0.0)
        : std::runtime_error(msg), final_grad_norm(grad_norm) {}
    double final_grad_norm;
};

namespace str {

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::string_view trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

// Splits into at most `max_fields` fields; the last field keeps any further separators.
inline std::vector<std::string> split_limit(std::string_view s, char sep, size_t max_fields) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (parts.size() + 1 < max_fields) {
        size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) break;
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    parts.emplace_back(s.substr(start));
    return parts;
}

}  // namespace str

// Sparse vector: entries sorted by index, indices unique.
struct SparseVec {
    std::vector<std::pair<uint32_t, double>> entries;

    size_t nnz() const { return entries.size(); }

    void push(uint32_t index, double value) { entries.emplace_back(index, value); }

    double l2_norm() const {
        double s = 0;
        for (const auto& [i, v] : entries) s += v * v;
        return std::sqrt(s);
    }
};

namespace rng {

// All randomized procedures draw from std::mt19937 through the helpers below.
// mt19937 output is pinned by the standard; std::shuffle and the distribution
// classes are not, so we avoid them for cross-platform reproducibility.
using Engine = std::mt19937;

inline Engine make_engine(uint64_t seed) {
    return Engine(static_cast<uint32_t>(seed ^ (seed >> 32)));
}

// Uniform integer in [0, n) by rejection sampling.
inline uint32_t bounded(Engine& eng, uint32_t n) {
    if (n <= 1) return 0;
    const uint32_t limit = UINT32_MAX - UINT32_MAX % n;
    uint32_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0, 1).
inline double uniform01(Engine& eng) {
    return eng() * (1.0 / 4294967296.0);
}

// Standard normal via Box-Muller (deterministic given the engine state).
inline double normal(Engine& eng) {
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01(eng);
    double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = bounded(eng, static_cast<uint32_t>(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace rng

namespace num {

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double log1pexp(double z) {
    if (z > 35.0) return z;
    if (z < -35.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

}  // namespace num

// Runs fn(i) for i in [0, n). Tasks must be independent; results written to
// distinct slots, so the output is identical for any job count.
inline void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const size_t workers = std::min<size_t>(static_cast<size_t>(jobs), n);
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sentikit
