#pragma once

#include <cstdint>

namespace kahler {

/// Execution policy for the data-parallel kernels. Every kernel has a serial
/// reference path; both paths produce bit-identical results because partial
/// results are always reduced in index order.
enum class Exec { serial, parallel };

/// Deterministic per-task seed derived from a suite seed and a task index
/// (splitmix64 finalizer).
inline std::uint64_t stream_seed(std::uint64_t suite_seed, std::uint64_t index) {
  std::uint64_t z = suite_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace kahler
