#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace specrec {

// Deterministic helpers on top of std::mt19937_64. The engine's output
// sequence is fixed by the standard; the distributions below are hand-rolled
// so results are reproducible across standard library implementations.

// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform_double(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % n;
}

// Standard normal via Box-Muller (cosine branch only).
inline double gaussian(std::mt19937_64& gen) {
    double u1 = uniform_double(gen);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform_double(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[uniform_below(gen, i)]);
    }
}

// Mix a root seed with a stream id so sub-components get decorrelated,
// reproducible seeds (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace specrec
