#include "hypflow/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hypflow/error.hpp"

namespace hypflow {

const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

// --- Spectrum ---------------------------------------------------------------

std::complex<double> Spectrum::leading() const {
  return eigenvalues.empty() ? std::complex<double>{} : eigenvalues.front();
}

double Spectrum::min_real() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& mu : eigenvalues) m = std::min(m, mu.real());
  return m;
}

// --- LU -------------------------------------------------------------------

LuDecomposition::LuDecomposition(const Matrix& a) : lu_(a), perm_(a.rows()) {
  require_square(a, "LU decomposition");
  const std::size_t n = a.n();
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (best <= std::numeric_limits<double>::epsilon() * scale * 1e-3) {
      singular_ = true;
      continue;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu_(i, k) / lu_(k, k);
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

Vector LuDecomposition::solve(std::span<const double> b) const {
  if (singular_) throw Error(ErrorKind::InvalidArgument, "linear solve with a singular matrix");
  const std::size_t n = lu_.n();
  if (b.size() != n) throw Error(ErrorKind::DimensionMismatch, "LU solve right-hand side");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

Matrix LuDecomposition::solve(const Matrix& b) const {
  const std::size_t n = lu_.n();
  if (b.rows() != n) throw Error(ErrorKind::DimensionMismatch, "LU solve right-hand side");
  Matrix x(n, b.cols());
  Vector col(n);
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
    const Vector sol = solve(col);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
  }
  return x;
}

double LuDecomposition::determinant() const {
  if (singular_) return 0.0;
  double d = sign_;
  for (std::size_t i = 0; i < lu_.n(); ++i) d *= lu_(i, i);
  return d;
}

Matrix inverse(const Matrix& a) { return LuDecomposition(a).solve(Matrix::identity(a.n())); }

double determinant(const Matrix& a) { return LuDecomposition(a).determinant(); }

// --- matrix exponential -------------------------------------------------------

namespace {

// Pade(13,13) coefficients and the scaling threshold theta_13 for which the
// backward error of the approximant is below unit roundoff.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Matrix mat_exp(const Matrix& a, double t, const Tolerances& tol) {
  require_square(a, "mat_exp");
  const std::size_t n = a.n();
  if (t == 0.0) return Matrix::identity(n);
  if (!a.all_finite() || !std::isfinite(t)) {
    throw Error(ErrorKind::NonFinite, "mat_exp input is not finite");
  }
  Matrix m = a * t;
  const double norm = m.norm1();
  int squarings = 0;
  if (norm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    if (squarings > tol.exp_max_squarings) {
      throw Error(ErrorKind::NonFinite, "mat_exp argument norm " + std::to_string(norm) +
                                            " needs more than the allowed squarings");
    }
    m *= std::ldexp(1.0, -squarings);
  }
  const Matrix id = Matrix::identity(n);
  const Matrix m2 = m * m;
  const Matrix m4 = m2 * m2;
  const Matrix m6 = m4 * m2;
  const auto& b = kPade13;
  const Matrix u_inner = m6 * (b[13] * m6 + b[11] * m4 + b[9] * m2) + b[7] * m6 + b[5] * m4 +
                         b[3] * m2 + b[1] * id;
  const Matrix u = m * u_inner;
  const Matrix v = m6 * (b[12] * m6 + b[10] * m4 + b[8] * m2) + b[6] * m6 + b[4] * m4 +
                   b[2] * m2 + b[0] * id;
  Matrix r = LuDecomposition(v - u).solve(v + u);
  for (int k = 0; k < squarings; ++k) {
    r = r * r;
    if (!r.all_finite()) throw Error(ErrorKind::NonFinite, "mat_exp overflowed while squaring");
  }
  if (!r.all_finite()) throw Error(ErrorKind::NonFinite, "mat_exp result is not finite");
  return r;
}

// --- eigenvalues ----------------------------------------------------------------

namespace {

double sign_of(double magnitude, double s) {
  return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

void balance(Matrix& a) {
  constexpr double kRadix = 2.0;
  constexpr double kRadixSq = kRadix * kRadix;
  const std::size_t n = a.n();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / kRadix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= kRadix;
        c *= kRadixSq;
      }
      g = r * kRadix;
      while (c > g) {
        f /= kRadix;
        c /= kRadixSq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

void reduce_to_hessenberg(Matrix& a) {
  const std::size_t n = a.n();
  if (n < 3) return;
  Vector v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    double alpha = 0.0;
    for (std::size_t i = 0; i < len; ++i) alpha += a(k + 1 + i, k) * a(k + 1 + i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (a(k + 1, k) > 0.0) alpha = -alpha;
    for (std::size_t i = 0; i < len; ++i) v[i] = a(k + 1 + i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = 0; i < len; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < len; ++i) s += v[i] * a(k + 1 + i, j);
      const double f = 2.0 * s / vnorm2;
      for (std::size_t i = 0; i < len; ++i) a(k + 1 + i, j) -= f * v[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < len; ++j) s += a(i, k + 1 + j) * v[j];
      const double f = 2.0 * s / vnorm2;
      for (std::size_t j = 0; j < len; ++j) a(i, k + 1 + j) -= f * v[j];
    }
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (eigenvalues only).
std::vector<std::complex<double>> hessenberg_qr(Matrix& a, double deflation_abs, long max_iterations) {
  const int n = static_cast<int>(a.n());
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<std::complex<double>> w(n);
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  long total = 0;
  int nn = n - 1;
  double t = 0.0;
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0, x = 0.0, y = 0.0, z = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        const double sub = std::abs(a(l, l - 1));
        if (sub <= eps * s || sub <= deflation_abs) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      x = a(nn, nn);
      if (l == nn) {
        w[nn--] = {x + t, 0.0};
      } else {
        y = a(nn - 1, nn - 1);
        const double ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          p = 0.5 * (y - x);
          q = p * p + ww;
          z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            w[nn - 1] = w[nn] = {x + z, 0.0};
            if (z != 0.0) w[nn] = {x - ww / z, 0.0};
          } else {
            w[nn] = {x + p, -z};
            w[nn - 1] = std::conj(w[nn]);
          }
          nn -= 2;
        } else {
          if (++total > max_iterations) {
            throw Error(ErrorKind::NoConvergence, "QR iteration exceeded " +
                                                      std::to_string(max_iterations) + " sweeps");
          }
          double wexc = ww;
          if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            wexc = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - wexc) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            if ((s = sign_of(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

Spectrum spectrum(const Matrix& a, const Tolerances& tol) {
  require_square(a, "spectrum");
  if (!a.all_finite()) throw Error(ErrorKind::NonFinite, "spectrum input is not finite");
  const std::size_t n = a.n();
  Matrix h = a;
  balance(h);
  reduce_to_hessenberg(h);
  const long cap = static_cast<long>(tol.qr_iterations_per_n2) * static_cast<long>(n * n);
  Spectrum out;
  out.eigenvalues = hessenberg_qr(h, tol.deflation_rel * a.frobenius_norm(), cap);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](const std::complex<double>& x, const std::complex<double>& y) {
              if (x.real() != y.real()) return x.real() > y.real();
              return x.imag() > y.imag();
            });
  out.abscissa = out.eigenvalues.front().real();
  return out;
}

// --- symmetric helpers ----------------------------------------------------------

SymmetricEigen symmetric_eigen(const Matrix& s) {
  require_square(s, "symmetric_eigen");
  const std::size_t n = s.n();
  Matrix a = s;
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= std::numeric_limits<double>::min()) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double tt = sign_of(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tt * tt + 1.0);
        const double sn = tt * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::optional<Matrix> cholesky(const Matrix& s) {
  require_square(s, "cholesky");
  const std::size_t n = s.n();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double x = s(i, j);
      for (std::size_t k = 0; k < j; ++k) x -= l(i, k) * l(j, k);
      l(i, j) = x / l(j, j);
    }
  }
  return l;
}

// --- Lyapunov ----------------------------------------------------------------------

SpdForm make_spd_form(const Matrix& p, const Tolerances& tol) {
  require_square(p, "make_spd_form");
  const std::size_t n = p.n();
  const double scale = p.max_abs();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(p(i, j) - p(j, i)) > tol.symmetry_rel * scale) {
        throw Error(ErrorKind::InvalidArgument, "form is not symmetric");
      }
    }
  }
  if (!cholesky(p)) throw Error(ErrorKind::InvalidArgument, "form is not positive definite");
  SpdForm form;
  form.P = p;
  form.lambda_max = symmetric_eigen(p).values.back();
  form.rate = 1.0 / (2.0 * form.lambda_max);
  return form;
}

SpdForm lyapunov_solve(const Matrix& a, const Tolerances& tol) {
  require_square(a, "lyapunov_solve");
  const Spectrum spec = spectrum(a, tol);
  if (spec.abscissa >= 0.0) {
    throw Error(ErrorKind::NotStable,
                "spectral abscissa " + std::to_string(spec.abscissa) + " is not negative");
  }
  const std::size_t n = a.n();
  // (A^T P + P A)_{ij} = sum_k A_{ki} P_{kj} + sum_l P_{il} A_{lj}
  Matrix sys(n * n, n * n);
  Vector rhs(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t k = 0; k < n; ++k) sys(row, k * n + j) += a(k, i);
      for (std::size_t l = 0; l < n; ++l) sys(row, i * n + l) += a(l, j);
      if (i == j) rhs[row] = -1.0;
    }
  }
  const Vector sol = LuDecomposition(sys).solve(rhs);
  Matrix p = Matrix::from_flat(n, sol);
  p = 0.5 * (p + p.transpose());
  const Matrix residual = a.transpose() * p + p * a + Matrix::identity(n);
  if (residual.frobenius_norm() > tol.lyapunov_residual * p.frobenius_norm()) {
    throw Error(ErrorKind::NoConvergence, "Lyapunov residual " +
                                              std::to_string(residual.frobenius_norm()) +
                                              " exceeds tolerance");
  }
  return make_spd_form(p, tol);
}

double p_norm(const SpdForm& form, std::span<const double> v) {
  if (v.size() != form.P.n()) {
    throw Error(ErrorKind::DimensionMismatch, "p_norm: vector has " + std::to_string(v.size()) +
                                                  " entries, form is " +
                                                  std::to_string(form.P.n()) + "-dimensional");
  }
  const Vector pv = form.P * v;
  return std::sqrt(std::max(0.0, dot(v, pv)));
}

double sup_operator_norm(const Matrix& a, const Tolerances& tol) {
  if (!a.all_finite()) throw Error(ErrorKind::NonFinite, "sup_operator_norm input is not finite");
  const Matrix gram = a.transpose() * a;
  const std::size_t n = gram.n();
  // start from the heaviest column of A^T A
  Vector x(n, 0.0);
  double best = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += gram(i, j) * gram(i, j);
    if (s > best) {
      best = s;
      for (std::size_t i = 0; i < n; ++i) x[i] = gram(i, j);
    }
  }
  double xn = norm2(x);
  if (xn == 0.0) return 0.0;
  for (double& xi : x) xi /= xn;
  double lambda = 0.0;
  for (int it = 0; it < tol.power_iteration_cap; ++it) {
    Vector y = gram * x;
    const double next = norm2(y);
    if (next == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / next;
    if (it > 0 && std::abs(next - lambda) <= tol.power_iteration_rel * next) {
      return std::sqrt(next);
    }
    lambda = next;
  }
  throw Error(ErrorKind::NoConvergence, "power iteration did not converge");
}

// --- projection ---------------------------------------------------------------------

Projection project_onto_span(const std::vector<Vector>& columns, std::span<const double> target) {
  const std::size_t k = columns.size();
  // Modified Gram-Schmidt with one reorthogonalization pass; R is upper triangular.
  std::vector<Vector> q;
  Matrix r(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    if (columns[j].size() != target.size()) {
      throw Error(ErrorKind::DimensionMismatch, "projection basis and target sizes differ");
    }
    Vector v = columns[j];
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const double c = dot(q[i], v);
        r(i, j) += c;
        for (std::size_t m = 0; m < v.size(); ++m) v[m] -= c * q[i][m];
      }
    }
    const double nv = norm2(v);
    if (nv == 0.0) throw Error(ErrorKind::InvalidArgument, "projection basis is linearly dependent");
    r(j, j) = nv;
    for (double& x : v) x /= nv;
    q.push_back(std::move(v));
  }
  Vector qt(k);
  for (std::size_t i = 0; i < k; ++i) qt[i] = dot(q[i], target);
  Projection out{Vector(k, 0.0), 0.0};
  for (std::size_t i = k; i-- > 0;) {
    double s = qt[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= r(i, j) * out.coeffs[j];
    out.coeffs[i] = s / r(i, i);
  }
  Vector resid(target.begin(), target.end());
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t m = 0; m < resid.size(); ++m) resid[m] -= out.coeffs[j] * columns[j][m];
  out.residual = norm2(resid);
  return out;
}

}  // namespace hypflow
