#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "hypflow/config.hpp"
#include "hypflow/matrix.hpp"

namespace hypflow {

/// Eigenvalues of a real matrix with multiplicity, sorted by descending real
/// part (ties by descending imaginary part).
struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  double abscissa = 0.0;

  /// Eigenvalue attaining the abscissa.
  std::complex<double> leading() const;
  /// Smallest real part.
  double min_real() const;
};

/// Adapted quadratic form ||v||_P = sqrt(v^T P v) with contraction rate.
struct SpdForm {
  Matrix P;
  double rate = 0.0;
  double lambda_max = 0.0;
};

/// e^{tA} by scaling and squaring with a degree-13 Pade approximant.
Matrix mat_exp(const Matrix& a, double t, const Tolerances& tol = default_tolerances());

/// Hessenberg reduction followed by Francis double-shift QR.
Spectrum spectrum(const Matrix& a, const Tolerances& tol = default_tolerances());

/// Solves A^T P + P A = -I for stable A.
SpdForm lyapunov_solve(const Matrix& a, const Tolerances& tol = default_tolerances());

/// Builds an SpdForm from a given symmetric positive definite P.
SpdForm make_spd_form(const Matrix& p, const Tolerances& tol = default_tolerances());

double p_norm(const SpdForm& form, std::span<const double> v);

/// Largest singular value via power iteration on A^T A.
double sup_operator_norm(const Matrix& a, const Tolerances& tol = default_tolerances());

// --- dense helpers --------------------------------------------------------

/// LU with partial pivoting. Throws InvalidArgument on a singular pivot.
class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix& a);

  Vector solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;
  double determinant() const;
  bool singular() const noexcept { return singular_; }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
  bool singular_ = false;
};

Matrix inverse(const Matrix& a);
double determinant(const Matrix& a);

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; eigenvectors are the columns of `vectors`.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& s);

/// Lower Cholesky factor, or nullopt when a pivot is not positive.
std::optional<Matrix> cholesky(const Matrix& s);

/// Least-squares coefficients of `target` in the span of `columns`
/// (each a flattened vector of equal length). Returns coefficients and the
/// Euclidean residual norm.
struct Projection {
  Vector coeffs;
  double residual = 0.0;
};
Projection project_onto_span(const std::vector<Vector>& columns, std::span<const double> target);

}  // namespace hypflow
