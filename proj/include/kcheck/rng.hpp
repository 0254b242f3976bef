#pragma once

#include <cstdint>
#include <random>

namespace kcheck {

using Rng = std::mt19937_64;

/// Derives an independent substream seed from (seed, stream).
///
/// The pair is folded as seed + 0x9E3779B97F4A7C15 * (stream + 1) and passed
/// through the SplitMix64 finalizer, so nearby streams of the same seed map to
/// decorrelated 64-bit states. Every consumer of randomness in the library
/// goes through this function: replication r of an experiment, replicate b of
/// a bootstrap, the fold shuffle, the location draw.
constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(split_seed(seed, stream));
}

/// Uniform on [0, 1) from the top 53 bits of one engine output.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fixed stream ids used by the analysis pipeline.
namespace streams {
inline constexpr std::uint64_t data = 0;
inline constexpr std::uint64_t folds = 1;
inline constexpr std::uint64_t locations = 2;
inline constexpr std::uint64_t bootstrap = 3;
inline constexpr std::uint64_t benchmark = 4;
}  // namespace streams

}  // namespace kcheck
