#pragma once

#include "hypflow/config.hpp"
#include "hypflow/linalg.hpp"
#include "hypflow/matrix.hpp"

namespace hypflow {

/// A point (g, v) of G x g. `v` is either a plain n-vector (the R^n case) or
/// an n x n algebra element flattened row-major; the generator acts on it
/// by left multiplication in both cases.
struct LiftedPoint {
  Matrix g;
  Vector v;

  friend bool operator==(const LiftedPoint&, const LiftedPoint&) = default;
};

/// How the generator acts on the algebra slot of a lifted point.
enum class AlgebraSlot { Vector, Matrix };

/// Proof that e^{At} contracts in an adapted norm: ||e^{At}v||_P <= e^{-at}||v||_P.
struct HyperbolicityCertificate {
  Matrix generator;
  SpdForm form;
  double abscissa = 0.0;
  AlgebraSlot slot = AlgebraSlot::Vector;

  std::size_t slot_dim() const { return form.P.n(); }
};

/// Applies an n x n matrix to the algebra slot (n-vector or flattened n x n).
Vector act(const Matrix& m, std::span<const double> v);

void require_invertible(const Matrix& g, const Tolerances& tol = default_tolerances());

/// (e^{At} g, e^{At} v).
LiftedPoint lifted_flow(const Matrix& a, double t, const LiftedPoint& x);

/// ||(g, v)|| = ||v||_P; the group component is ignored.
double product_norm(const LiftedPoint& x, const HyperbolicityCertificate& cert);

/// Throws NotHyperbolicError carrying the eigenvalue with largest real part
/// when A is not stable.
HyperbolicityCertificate certify(const Matrix& a, AlgebraSlot slot = AlgebraSlot::Vector,
                                 const Tolerances& tol = default_tolerances());

/// The unique tau with ||e^{A tau} v||_P = 1. Throws ZeroVector for v = 0.
double crossing_time(const HyperbolicityCertificate& cert, const LiftedPoint& x,
                     const Tolerances& tol = default_tolerances());
double crossing_time(const HyperbolicityCertificate& cert, std::span<const double> v,
                     const Tolerances& tol = default_tolerances());

}  // namespace hypflow
