#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cuff {

using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic per-module substream: one top-level seed, named streams.
inline uint64_t substream_seed(uint64_t seed, std::string_view label) {
    uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (char c : label) {
        h ^= static_cast<uint8_t>(c);
        h *= 1099511628211ULL;
    }
    return splitmix64(seed ^ splitmix64(h));
}

inline Rng make_rng(uint64_t seed, std::string_view label) {
    return Rng(substream_seed(seed, label));
}

}  // namespace cuff
