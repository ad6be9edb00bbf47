#pragma once

#include <cstdint>
#include <random>

#include "hypflow/matrix.hpp"

namespace hypflow {

/// Seeded generator with platform-independent deviates. The standard
/// distributions are implementation-defined, so uniform and normal draws are
/// built directly from the raw 64-bit engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Box-Muller.
  double normal();
  std::uint64_t next() { return engine_(); }

  Vector uniform_vector(std::size_t n, double lo, double hi);
  Vector normal_vector(std::size_t n);
  Matrix uniform_matrix(std::size_t n, double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

/// Random matrix with spectral abscissa in [-margin_hi, -margin_lo]: a
/// uniform matrix shifted by a multiple of the identity.
Matrix random_stable_matrix(Rng& rng, std::size_t n, double entry_scale, double margin_lo,
                            double margin_hi);

/// e^{M} for a uniform M, hence always invertible.
Matrix random_group_element(Rng& rng, std::size_t n, double entry_scale);

}  // namespace hypflow
