#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypflow/lifted_flow.hpp"
#include "hypflow/random.hpp"

namespace hypflow {

/// Two hyperbolicity certificates of equal shape.
class ConjugacyData {
 public:
  ConjugacyData(HyperbolicityCertificate cert_a, HyperbolicityCertificate cert_b);

  const HyperbolicityCertificate& cert_a() const noexcept { return a_; }
  const HyperbolicityCertificate& cert_b() const noexcept { return b_; }
  std::size_t n() const noexcept { return a_.generator.n(); }
  /// The same data with the two roles exchanged.
  ConjugacyData swapped() const { return ConjugacyData(b_, a_); }

 private:
  HyperbolicityCertificate a_;
  HyperbolicityCertificate b_;
};

/// Equally spaced grid t_min, ..., t_max with `steps` points.
struct TimeGrid {
  double t_min = -3.0;
  double t_max = 3.0;
  std::size_t steps = 25;

  std::vector<double> points() const;
  void validate() const;
};

/// Radial projection onto the unit sphere of the B-adapted norm.
Vector h0(const ConjugacyData& cd, std::span<const double> w);

/// psi(g, v) = (e^{-B tau} e^{A tau} g, e^{-B tau} h0(e^{A tau} v)), tau = t_A(v);
/// the zero section is fixed.
LiftedPoint psi_forward(const ConjugacyData& cd, const LiftedPoint& x);
/// Same construction with A and B exchanged.
LiftedPoint psi_inverse(const ConjugacyData& cd, const LiftedPoint& y);

/// Relative distance used by all conjugacy residuals: Frobenius on the group
/// part plus the adapted norm on the algebra part, each scaled by
/// max(1, |reference|).
double lifted_distance(const LiftedPoint& x, const LiftedPoint& reference, const SpdForm& form);

struct ResidualSample {
  std::size_t sample_id = 0;
  double t = 0.0;
  double residual = 0.0;
};

struct ResidualReport {
  double max_residual = 0.0;
  double argmax_t = 0.0;
  LiftedPoint argmax_point;
  std::size_t samples = 0;
  std::size_t grid_points = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ResidualReport&, const ResidualReport&) = default;
};

struct VerifyOptions {
  std::size_t samples = 100;
  TimeGrid grid;
  std::uint64_t seed = 42;
  double radius_min = 1e-3;
  double radius_max = 1e3;
  double group_entry_scale = 0.5;
  unsigned threads = 0;  // 0 = hardware concurrency
  /// Overrides how group components are drawn.
  std::function<Matrix(Rng&)> group_sampler;
};

/// Draws lifted points: g from the group sampler, v uniform on the
/// P_A-sphere scaled by a log-uniform radius.
std::vector<LiftedPoint> sample_points(const ConjugacyData& cd, const VerifyOptions& options, Rng& rng);

/// max over samples and grid of dist(psi(Phi_A(t,x)), Phi_B(t, psi(x))).
ResidualReport verify_conjugacy(const ConjugacyData& cd, const VerifyOptions& options,
                                std::vector<ResidualSample>* trace = nullptr);

/// max over samples of dist(psi_inverse(psi_forward(x)), x).
ResidualReport verify_round_trip(const ConjugacyData& cd, const VerifyOptions& options);

enum class PairVerdict { ConjugateStable, ConjugateUnstable, Inconclusive };
const char* to_string(PairVerdict v);
PairVerdict pair_verdict_from_string(const std::string& s);

struct PairClassification {
  PairVerdict verdict = PairVerdict::Inconclusive;
  Spectrum spectrum_a;
  Spectrum spectrum_b;
  // 2x2 only
  bool gl2 = false;
  double trace_a = 0.0;
  double trace_b = 0.0;
  double discriminant_a = 0.0;  // (a-d)^2 + 4bc
  double discriminant_b = 0.0;
  bool trace_rule_applies = false;  // both discriminants <= 0
  std::string trace_rule = "none";  // "trace-negative", "trace-positive" or "none"
};

/// Eigenvalue-based decision: both stable, both anti-stable (every real part
/// positive), or neither.
PairClassification classify_pair(const Matrix& a, const Matrix& b);
PairClassification classify_gl2_pair(const Matrix& a, const Matrix& b);

Matrix negate_generator(const Matrix& a);

/// Certifies (A, B), or (-A, -B) for an anti-stable pair, and runs
/// verify_conjugacy on the certified pair. Returns nullopt when inconclusive.
struct PairConjugacy {
  PairClassification classification;
  std::optional<ResidualReport> residual;
};
PairConjugacy verify_pair(const Matrix& a, const Matrix& b, const VerifyOptions& options);

}  // namespace hypflow
