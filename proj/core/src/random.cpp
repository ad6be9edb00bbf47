#include "hypflow/random.hpp"

#include <cmath>
#include <numbers>

#include "hypflow/linalg.hpp"

namespace hypflow {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vector Rng::uniform_vector(std::size_t n, double lo, double hi) {
  Vector v(n);
  for (double& x : v) x = uniform(lo, hi);
  return v;
}

Vector Rng::normal_vector(std::size_t n) {
  Vector v(n);
  for (double& x : v) x = normal();
  return v;
}

Matrix Rng::uniform_matrix(std::size_t n, double lo, double hi) {
  Matrix m(n, n);
  for (double& x : m.data()) x = uniform(lo, hi);
  return m;
}

Matrix random_stable_matrix(Rng& rng, std::size_t n, double entry_scale, double margin_lo,
                            double margin_hi) {
  Matrix m = rng.uniform_matrix(n, -entry_scale, entry_scale);
  const double margin = rng.uniform(margin_lo, margin_hi);
  const double shift = spectrum(m).abscissa + margin;
  for (std::size_t i = 0; i < n; ++i) m(i, i) -= shift;
  return m;
}

Matrix random_group_element(Rng& rng, std::size_t n, double entry_scale) {
  return mat_exp(rng.uniform_matrix(n, -entry_scale, entry_scale), 1.0);
}

}  // namespace hypflow
