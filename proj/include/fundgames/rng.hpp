#pragma once

#include <cstdint>
#include <random>

namespace fundgames {

// splitmix64 finalizer (Stafford mix13).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based stream splitting: the seed of stream (a, b) under a master
// seed is a fixed function of (master, a, b), so any worker can rebuild any
// stream without coordination. Used with a = path index and b = shock source
// (0 = common shock, k = k-th idiosyncratic shock), and by the convergence
// study with a = population size index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(master ^ mix64(a)) ^ mix64(~b));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return std::mt19937_64(derive_seed(master, a, b));
}

// Canonical uniform in [0, 1) from the top 53 bits; engine-stable across
// standard library implementations, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace fundgames
