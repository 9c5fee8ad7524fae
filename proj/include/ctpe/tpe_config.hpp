#pragma once

#include <cstddef>
#include <cstdint>

namespace ctpe {

struct TpeConfig {
  std::size_t n_startup = 10;
  std::size_t n_candidates = 24;
  /// Exploration base for metric dimensions without their own override.
  double b = 6.0;
  /// Divide beta by sqrt(log_b C) for metric dimensions.
  bool modification_enabled = true;
  /// When false, metric dimensions fall back to the Aitchison-Aitken kernel.
  bool metric_kernel_enabled = true;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument if a field is out of range.
  void validate() const;
};

}  // namespace ctpe
