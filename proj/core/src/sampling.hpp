#pragma once

#include <cstdint>
#include <random>

namespace teamvar::detail {

// Uniform draws built directly on the raw 64-bit generator output: stdlib
// distribution objects are implementation-defined, these are reproducible
// across toolchains.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_index(std::mt19937_64& rng, int n) {
    const int k = static_cast<int>(uniform01(rng) * n);
    return k >= n ? n - 1 : k;
}

// One independent stream per (seed, index) pair; multistart uses the start
// index, simulation uses the player index.
inline std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

} // namespace teamvar::detail
