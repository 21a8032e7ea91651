#pragma once

#include <cstdint>
#include <random>

namespace ntkflow {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream keyed by (seed, index); used so that parallel sampling
// tasks stay reproducible regardless of scheduling order.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index = 0) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ (index + 1)));
}

} // namespace ntkflow
