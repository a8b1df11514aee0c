#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace semorder {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed and a path of task indices (row, replication, cell, ...).
std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// Portable random stream.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the
/// standard. Uniforms take the top 53 bits; normals use the Box-Muller
/// transform (both values of a pair are used). No std::*_distribution is
/// involved, so a given seed yields the same numbers on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lower, upper).
  double uniform(double lower, double upper) { return lower + (upper - lower) * uniform(); }
  double normal();
  /// +1 or -1 with probability 1/2 each.
  double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace semorder
