#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hypflow/conjugacy.hpp"
#include "hypflow/lie_algebra.hpp"
#include "hypflow/matrix.hpp"

namespace hypflow {

/// (h, w) in H x| V with (g,v)(h,w) = (gh, v + gw).
struct AffineElement {
  Matrix h;
  Vector w;

  static AffineElement identity(std::size_t n);
  friend bool operator==(const AffineElement&, const AffineElement&) = default;
};

/// X = (A, b) in h x| V.
struct AffineGenerator {
  Matrix a;
  Vector b;
};

/// Generator whose linear part is given in the basis of a realized algebra.
struct AffineAlgebraGenerator {
  AlgebraElement a;
  Vector b;
};

AffineElement affine_mul(const AffineElement& x, const AffineElement& y);
AffineElement affine_inverse(const AffineElement& x);
/// (g, v) . w = g w + v.
Vector affine_action(const AffineElement& x, std::span<const double> w);

/// exp(tX) read off the exponential of the augmented matrix [[A, b], [0, 0]].
AffineElement affine_exp(const AffineGenerator& x, double t);
/// exp(tX) g.
AffineElement affine_flow(const AffineGenerator& x, double t, const AffineElement& g);
/// Canonical projection onto H.
Matrix project(const AffineElement& g);
/// exp(tA) h.
Matrix linear_part_flow(const Matrix& a, double t, const Matrix& h);

/// |h1 - h2|_F + |w1 - w2|_2.
double affine_distance(const AffineElement& x, const AffineElement& y);

/// Sign changes of values[i] - level along a sampled curve.
std::size_t count_level_crossings(std::span<const double> values, double level);

struct TransversalityReport {
  std::vector<std::size_t> crossings;  // one entry per sampled orbit
  bool transversal = false;            // every orbit crosses exactly once
  std::size_t grid_points = 0;
};

/// Counts unit crossings of t -> f_s(t) for each sampled curve f_s.
TransversalityReport transversality(const std::vector<std::function<double(double)>>& curves,
                                    const TimeGrid& grid);

/// Crossings of ||e^{tM} v||_P = 1 for each v.
TransversalityReport transversality_linear(const Matrix& m, const SpdForm& form,
                                           const std::vector<Vector>& initial, const TimeGrid& grid);

struct AffineAudit {
  TransferAudit hypothesis;
  TransversalityReport transversality_1;
  TransversalityReport transversality_2;
  std::string distance_model = "frobenius+euclidean-to-center";
};

struct AffineAuditOptions {
  std::uint64_t seed = 42;
  std::size_t samples = 20;
  TimeGrid grid{-3.0, 3.0, 601};
  double entry_scale = 0.5;
  VerifyOptions verify;  // used only when the hypothesis holds
};

/// Ad-spectrum hypothesis on (A1, A2) plus unit-sphere transversality of
/// proxy-distance curves d(exp(tX_i) g, identity) for sampled g.
AffineAudit affine_hypothesis_audit(const LieAlgebraSpec& spec_h, const AffineAlgebraGenerator& x1,
                                    const AffineAlgebraGenerator& x2, const AffineAuditOptions& options);

}  // namespace hypflow
