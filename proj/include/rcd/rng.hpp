#pragma once

#include <cstdint>
#include <random>

namespace rcd {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of path `index` in an ensemble: mix64(master + index). Distinct
/// noise channels of one path are separated by `stream`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t stream = 0) noexcept
{
    std::uint64_t s = mix64(master + index);
    return stream == 0 ? s : mix64(s ^ mix64(stream));
}

inline Engine make_engine(std::uint64_t seed)
{
    return Engine(seed);
}

inline double uniform01(Engine& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace rcd
