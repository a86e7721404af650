#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace custprof {

// splitmix64 step; used to derive independent sub-seeds from one config seed
// so that nested loops (fold, restart, replicate) stay deterministic.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t a) {
    return splitmix64(seed ^ splitmix64(a));
}

inline std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mixSeed(mixSeed(seed, a), b);
}

inline std::mt19937_64 makeRng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Uniform pick in [0, n), avoiding distribution objects so the stream of
// draws is easy to reason about when auditing determinism.
inline std::size_t pickIndex(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

inline double pickUnit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Seeded sample of k distinct indices from [0, n), in draw order.
inline std::vector<std::size_t> sampleWithoutReplacement(std::mt19937_64& rng, std::size_t n,
                                                         std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && i < n; ++i) {
        std::size_t j = i + pickIndex(rng, n - i);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

}  // namespace custprof
