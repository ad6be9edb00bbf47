#include "hypflow/lifted_flow.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hypflow/error.hpp"

namespace hypflow {

Vector act(const Matrix& m, std::span<const double> v) {
  const std::size_t n = m.n();
  if (v.size() == n) return m * v;
  if (v.size() == n * n) return (m * Matrix::from_flat(n, v)).flat();
  throw Error(ErrorKind::DimensionMismatch, "algebra slot has " + std::to_string(v.size()) +
                                                " entries; expected " + std::to_string(n) +
                                                " or " + std::to_string(n * n));
}

void require_invertible(const Matrix& g, const Tolerances& tol) {
  require_square(g, "group element");
  const double scale = std::pow(std::max(g.max_abs(), std::numeric_limits<double>::min()),
                                static_cast<double>(g.n()));
  if (!(std::abs(determinant(g)) > tol.invertibility_rel * scale)) {
    throw Error(ErrorKind::InvalidArgument, "group element is not invertible");
  }
}

LiftedPoint lifted_flow(const Matrix& a, double t, const LiftedPoint& x) {
  require_same_shape(a, x.g, "lifted_flow");
  const Matrix e = mat_exp(a, t);
  LiftedPoint y{e * x.g, act(e, x.v)};
  if (!y.g.all_finite() || !all_finite(y.v)) {
    throw Error(ErrorKind::NonFinite, "lifted flow overflowed");
  }
  return y;
}

double product_norm(const LiftedPoint& x, const HyperbolicityCertificate& cert) {
  return p_norm(cert.form, x.v);
}

HyperbolicityCertificate certify(const Matrix& a, AlgebraSlot slot, const Tolerances& tol) {
  require_square(a, "certify");
  const Spectrum spec = spectrum(a, tol);
  if (spec.abscissa >= 0.0) throw NotHyperbolicError(spec.leading(), spec.abscissa);
  HyperbolicityCertificate cert;
  cert.generator = a;
  cert.abscissa = spec.abscissa;
  cert.slot = slot;
  const SpdForm base = lyapunov_solve(a, tol);
  if (slot == AlgebraSlot::Vector) {
    cert.form = base;
  } else {
    // (A (x) I)^T (P (x) I) + (P (x) I)(A (x) I) = (A^T P + P A) (x) I
    cert.form = make_spd_form(kron(base.P, Matrix::identity(a.n())), tol);
  }
  return cert;
}

double crossing_time(const HyperbolicityCertificate& cert, const LiftedPoint& x,
                     const Tolerances& tol) {
  return crossing_time(cert, std::span<const double>(x.v), tol);
}

double crossing_time(const HyperbolicityCertificate& cert, std::span<const double> v,
                     const Tolerances& tol) {
  if (v.size() != cert.slot_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "crossing_time: vector does not match certificate");
  }
  if (norm2(v) == 0.0) throw Error(ErrorKind::ZeroVector, "no unit-sphere crossing for v = 0");
  const Matrix& a = cert.generator;

  // f(t) = ||e^{At} v||_P - 1 is strictly decreasing.
  struct Eval {
    double f;
    double slope;
  };
  auto eval = [&](double t) {
    const Vector w = act(mat_exp(a, t, tol), v);
    const double nw = p_norm(cert.form, w);
    const Vector pw = cert.form.P * act(a, w);
    return Eval{nw - 1.0, dot(w, pw) / nw};
  };

  const Eval at0 = eval(0.0);
  if (at0.f == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int doublings = 0;
  if (at0.f > 0.0) {
    hi = 1.0;
    while (eval(hi).f > 0.0) {
      if (++doublings > tol.crossing_doublings) {
        throw Error(ErrorKind::NoConvergence, "crossing time bracket did not close");
      }
      lo = hi;
      hi *= 2.0;
    }
  } else {
    lo = -1.0;
    while (eval(lo).f < 0.0) {
      if (++doublings > tol.crossing_doublings) {
        throw Error(ErrorKind::NoConvergence, "crossing time bracket did not close");
      }
      hi = lo;
      lo *= 2.0;
    }
  }

  // Newton steps safeguarded by the bisection bracket.
  double t = 0.5 * (lo + hi);
  double best_t = t;
  double best_f = std::numeric_limits<double>::infinity();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < tol.crossing_iterations; ++it) {
    const Eval e = eval(t);
    if (std::abs(e.f) < std::abs(best_f)) {
      best_f = e.f;
      best_t = t;
    }
    if (std::abs(e.f) <= 2.0 * eps) break;
    if (e.f > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    if (hi - lo <= 4.0 * eps * std::max({1.0, std::abs(lo), std::abs(hi)})) break;
    const double newton = e.slope < 0.0 ? t - e.f / e.slope : std::numeric_limits<double>::quiet_NaN();
    t = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
  }
  if (!(std::abs(best_f) <= tol.crossing_residual)) {
    throw Error(ErrorKind::NoConvergence,
                "crossing time residual " + std::to_string(best_f) + " above tolerance");
  }
  return best_t;
}

}  // namespace hypflow
