#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ep {

// All randomness in the project flows through these helpers. std::mt19937_64
// is fully specified by the standard and the mappings below avoid the
// implementation-defined std::uniform_*_distribution / std::shuffle, so runs
// with equal seeds are bitwise reproducible.
using Rng = std::mt19937_64;

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

// Derives an independent named stream ("shuffle", "negatives", ...) from one
// run seed.
inline Rng make_substream(std::uint64_t seed, std::string_view name) {
    const std::uint64_t h = fnv1a(name);
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return Rng(seq);
}

// Unbiased draw from [0, n). Rejection sampling over the full 64-bit range.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

// Uniform in [lo, hi) using the top 53 bits.
inline double uniform_real(Rng& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

// Fisher-Yates.
template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

// First k entries of a partial Fisher-Yates pass; draws exactly k values.
template <typename T>
std::vector<T> sample_without_replacement(const std::vector<T>& items, std::size_t k, Rng& rng) {
    assert(k <= items.size());
    std::vector<T> pool(items);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace ep
