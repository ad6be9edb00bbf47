#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypflow/config.hpp"
#include "hypflow/conjugacy.hpp"
#include "hypflow/linalg.hpp"
#include "hypflow/matrix.hpp"

namespace hypflow {

struct AlgebraElement {
  Vector coords;

  friend bool operator==(const AlgebraElement&, const AlgebraElement&) = default;
};

/// A finite-dimensional real Lie algebra given by structure constants
/// [e_i, e_j] = sum_k c(i,j,k) e_k, optionally realized by matrices.
class LieAlgebraSpec {
 public:
  struct Bracket {
    std::size_t i;
    std::size_t j;
    Vector coeffs;
  };

  /// Missing pairs default to zero; (j,i) is completed antisymmetrically.
  /// Validates antisymmetry, Jacobi and the realization.
  LieAlgebraSpec(std::string name, std::vector<std::string> basis, const std::vector<Bracket>& brackets,
                 std::optional<std::vector<Matrix>> realization = std::nullopt,
                 const Tolerances& tol = default_tolerances());

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return basis_.size(); }
  const std::vector<std::string>& basis() const noexcept { return basis_; }
  double c(std::size_t i, std::size_t j, std::size_t k) const { return c_[(i * dim() + j) * dim() + k]; }
  bool has_realization() const noexcept { return realization_.has_value(); }
  const std::vector<Matrix>& realization() const;
  /// Matrix size of the realization.
  std::size_t realization_n() const { return realization().front().n(); }

  /// max over basis triples of |[e_i,[e_j,e_k]] + cyclic|.
  double jacobi_residual() const;
  /// max over basis pairs of |[E_i,E_j] - sum_k c(i,j,k) E_k|.
  double realization_residual() const;
  /// Nonzero brackets with i < j.
  std::vector<Bracket> brackets() const;

 private:
  std::string name_;
  std::vector<std::string> basis_;
  Vector c_;
  std::optional<std::vector<Matrix>> realization_;
};

/// sl2, so3, heisenberg3, abelian2, gl2, solvable2.
std::vector<std::string> builtin_algebra_names();
LieAlgebraSpec builtin_algebra(const std::string& name);

AlgebraElement basis_element(const LieAlgebraSpec& spec, std::size_t i);
AlgebraElement bracket(const LieAlgebraSpec& spec, const AlgebraElement& x, const AlgebraElement& y);
/// Column j is bracket(x, e_j).
Matrix ad_matrix(const LieAlgebraSpec& spec, const AlgebraElement& x);
/// K(e_i, e_j) = trace(ad e_i ad e_j).
Matrix killing_gram(const LieAlgebraSpec& spec);
double killing_form(const LieAlgebraSpec& spec, const AlgebraElement& x, const AlgebraElement& y);

struct SemisimplicityVerdict {
  bool semisimple = false;
  double determinant = 0.0;
  double threshold = 0.0;
  /// A vector in the radical of the Killing form when degenerate.
  std::optional<Vector> null_vector;
};
/// Cartan criterion with a scale-aware determinant threshold.
SemisimplicityVerdict is_semisimple(const LieAlgebraSpec& spec, const Tolerances& tol = default_tolerances());

/// sum_i x_i E_i.
Matrix realize(const LieAlgebraSpec& spec, const AlgebraElement& x);
/// Matrix of X -> g X g^{-1} in the basis. Throws NotInSpan when the
/// conjugate of a basis element leaves the realized algebra.
Matrix big_ad(const LieAlgebraSpec& spec, const Matrix& g, const Tolerances& tol = default_tolerances());

struct GridResidual {
  double max_residual = 0.0;
  double argmax_t = 0.0;
  std::size_t grid_points = 0;
};

/// max over the grid of |d/dt Ad(e^{At} g0) - ad(A) Ad(e^{At} g0)|_F with
/// centered differences.
GridResidual adjoint_ode_check(const LieAlgebraSpec& spec, const AlgebraElement& a, const Matrix& g0,
                               const TimeGrid& grid, const Tolerances& tol = default_tolerances());

/// max over the grid of |Ad(e^{tA}) - e^{t ad(A)}|_F.
GridResidual intertwining_check(const LieAlgebraSpec& spec, const AlgebraElement& a, const TimeGrid& grid,
                                const Tolerances& tol = default_tolerances());

/// Why "every eigenvalue of ad(A) has negative real part" fails for one element.
struct HypothesisWitness {
  std::string element;                 // "A" or "B"
  std::complex<double> leading;        // eigenvalue with largest real part
  double abscissa = 0.0;
  Vector kernel_vector;                // A itself: ad(A) A = [A, A] = 0
  double self_bracket_residual = 0.0;  // |ad(A) A|
  std::optional<double> trace_ad;      // reported on semisimple algebras
};

struct TransferAudit {
  std::string algebra;
  SemisimplicityVerdict semisimplicity;
  Spectrum spectrum_a;
  Spectrum spectrum_b;
  bool hypothesis_holds = false;
  std::vector<HypothesisWitness> witnesses;
  /// Conjugacy residual of the Ad-coordinate flows when the hypothesis holds.
  std::optional<ResidualReport> conjugacy;
};

/// Checks the ad-spectrum hypothesis and, when it holds, verifies the
/// conjugacy of e^{t ad A} and e^{t ad B} on points of the image of Ad.
TransferAudit semisimple_transfer_audit(const LieAlgebraSpec& spec, const AlgebraElement& a,
                                        const AlgebraElement& b, const VerifyOptions& options);

/// Linear path of the audit: works on arbitrary generators acting on
/// gl(dim) with given group samples, no Lie algebra involved.
TransferAudit transfer_audit_from_ad(const std::string& name, const SemisimplicityVerdict& verdict,
                                     const Matrix& ad_a, const Matrix& ad_b, const Vector& a_coords,
                                     const Vector& b_coords, const VerifyOptions& options);

enum class DecayStatus { Bounded, Unsatisfiable, Trivial };
const char* to_string(DecayStatus s);
DecayStatus decay_status_from_string(const std::string& s);

struct DecayPoint {
  double t = 0.0;
  double distance = 0.0;  // |X(t) - Id|_F
  double bound = 0.0;     // e^{-a t} |X(0) - Id|_F
};

struct DecayReport {
  DecayStatus status = DecayStatus::Unsatisfiable;
  double abscissa = 0.0;
  double rate = 0.0;
  /// Smallest c with distance <= c * bound on the grid (Bounded only).
  std::optional<double> constant;
  double initial_distance = 0.0;
  std::vector<DecayPoint> curve;
  std::string distance_model = "frobenius-to-identity";
};

/// Distance-decay audit along X(t) = e^{tM} X0 for t >= 0 grid points.
DecayReport decay_on_linear_path(const Matrix& m, const Matrix& x0, const TimeGrid& grid);

/// decay_on_linear_path with M = ad(A) and X0 = Ad(g0).
DecayReport adjoint_decay_check(const LieAlgebraSpec& spec, const AlgebraElement& a, const Matrix& g0,
                                const TimeGrid& grid, const Tolerances& tol = default_tolerances());

}  // namespace hypflow
