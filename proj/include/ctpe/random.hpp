#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace ctpe {

/// Random engine used everywhere. The engine's output sequence is fixed by
/// the standard; the helpers below avoid the std distributions, whose
/// algorithms are implementation-defined, so draws reproduce across platforms.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one engine output.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [low, high).
inline double uniform_real(Rng& rng, double low, double high) {
  return low + (high - low) * uniform01(rng);
}

/// Uniform integer in [0, n). Rejection sampling keeps it exactly unbiased.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n <= 1) {
    return 0;
  }
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw = rng();
  while (draw >= limit) {
    draw = rng();
  }
  return draw % n;
}

}  // namespace ctpe
