#pragma once
// Seed derivation for reproducible substreams.
//
// Every stochastic component draws from its own mt19937_64 seeded through
// splitmix64 so that event order, thread count and call order cannot
// perturb each other's streams.

#include <cstdint>
#include <random>

namespace cognet {

// splitmix64 mix step; good avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent substream seed from a base seed and up to three tags.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix64(seed ^ mix64(a));
    s = mix64(s ^ mix64(b + 0x632be59bd9b4e019ULL));
    return mix64(s ^ mix64(c + 0x9e6c63d0876a9a47ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    return std::mt19937_64(substream(seed, a, b, c));
}

} // namespace cognet
