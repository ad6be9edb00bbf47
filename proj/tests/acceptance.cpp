// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "cli.hpp"
#include "hypflow/affine.hpp"
#include "hypflow/conjugacy.hpp"
#include "hypflow/error.hpp"
#include "hypflow/json_io.hpp"
#include "hypflow/lie_algebra.hpp"
#include "hypflow/lifted_flow.hpp"
#include "hypflow/random.hpp"
#include "stable_pairs.hpp"

using namespace hypflow;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& criterion) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = criterion();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s [%2d] %s: %s (%.2fs)\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs);
  std::fflush(stdout);
  if (!out.pass) ++failures;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// The population shared by criteria 1-3.
struct StableCase {
  Matrix a;
  HyperbolicityCertificate cert;
  std::vector<Vector> vs;
};

std::vector<StableCase> stable_population() {
  Rng rng(20240601);
  std::vector<StableCase> cases;
  for (std::size_t i = 0; i < 200; ++i) {
    const std::size_t n = 2 + i % 3;
    StableCase c;
    c.a = random_stable_matrix(rng, n, 1.0, 0.05, 2.0);
    c.cert = certify(c.a);
    for (int k = 0; k < 20; ++k) c.vs.push_back(rng.normal_vector(n));
    cases.push_back(std::move(c));
  }
  return cases;
}

Outcome criterion_hyperbolic_estimate(const std::vector<StableCase>& cases) {
  std::size_t violations = 0;
  double worst = 0.0;
  for (const auto& c : cases) {
    for (int k = 0; k <= 50; ++k) {
      const double t = 0.1 * k;
      const Matrix e = mat_exp(c.a, t);
      for (const auto& v : c.vs) {
        const double ratio = p_norm(c.cert.form, e * v) / (std::exp(-c.cert.form.rate * t) * p_norm(c.cert.form, v));
        worst = std::max(worst, ratio);
        if (ratio > 1.0 + 1e-8) ++violations;
      }
    }
  }
  return {violations == 0, "200 matrices x 20 v x 51 t, violations " + std::to_string(violations) +
                               ", max ratio " + sci(worst)};
}

Outcome criterion_crossing_time(const std::vector<StableCase>& cases) {
  double worst = 0.0;
  for (const auto& c : cases) {
    for (const auto& v : c.vs) {
      const double tau = crossing_time(c.cert, v);
      worst = std::max(worst, std::abs(p_norm(c.cert.form, mat_exp(c.a, tau) * v) - 1.0));
    }
  }
  const HyperbolicityCertificate minus_identity = certify(-Matrix::identity(3));
  const double p_err = (minus_identity.form.P - 0.5 * Matrix::identity(3)).max_abs();
  Rng rng(7);
  double closed = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vector v = rng.normal_vector(3);
    v = scale(v, std::exp(rng.uniform(-5.0, 5.0)));
    closed = std::max(closed, std::abs(crossing_time(minus_identity, v) - std::log(p_norm(minus_identity.form, v))));
  }
  const bool ok = worst <= 1e-10 && closed <= 1e-10 && p_err <= 1e-12;
  return {ok, "max |norm-1| " + sci(worst) + ", closed form A=-I max |tau - ln|v|_P| " + sci(closed)};
}

Outcome criterion_cocycle(const std::vector<StableCase>& cases) {
  Rng rng(99);
  double worst = 0.0;
  for (std::size_t s = 0; s < 200; ++s) {
    const StableCase& c = cases[s];
    const LiftedPoint x{random_group_element(rng, c.a.n(), 0.5), rng.normal_vector(c.a.n())};
    const double t = rng.uniform(-3.0, 3.0);
    const double lhs = crossing_time(c.cert, lifted_flow(c.a, t, x));
    worst = std::max(worst, std::abs(lhs - (crossing_time(c.cert, x) - t)));
  }
  return {worst <= 1e-8, "200 samples, max |t_A(Phi(t,x)) - t_A(x) + t| " + sci(worst)};
}

Outcome criterion_conjugacy() {
  const auto pairs = testing_support::stable_pairs(50, 31337);
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ConjugacyData cd(certify(pairs[i].first), certify(pairs[i].second));
    VerifyOptions opts;
    opts.seed = 1000 + i;
    worst = std::max(worst, verify_conjugacy(cd, opts).max_residual);
  }
  // A = -I, B = -2I: psi = ((|v|_2 / sqrt 2) g, |v|_2 v)
  const ConjugacyData cd(certify(-Matrix::identity(3)), certify(-2.0 * Matrix::identity(3)));
  Rng rng(5);
  double closed = 0.0;
  for (int k = 0; k < 100; ++k) {
    const LiftedPoint x{random_group_element(rng, 3, 0.5), scale(rng.normal_vector(3), std::exp(rng.uniform(-4.0, 4.0)))};
    const LiftedPoint y = psi_forward(cd, x);
    const double r = norm2(x.v);
    const Vector v_expected = scale(x.v, r);
    const Matrix g_expected = (r / std::sqrt(2.0)) * x.g;
    closed = std::max(closed, norm2(sub(y.v, v_expected)) / std::max(1.0, norm2(v_expected)));
    closed = std::max(closed, (y.g - g_expected).frobenius_norm() / std::max(1.0, g_expected.frobenius_norm()));
  }
  const bool ok = worst <= 1e-6 && closed <= 1e-9;
  return {ok, "50 pairs x 100 samples x 25 t, max residual " + sci(worst) + "; closed form max rel err " + sci(closed)};
}

Outcome criterion_round_trip() {
  const auto pairs = testing_support::stable_pairs(50, 31337);
  double worst = 0.0;
  double same = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ConjugacyData cd(certify(pairs[i].first), certify(pairs[i].second));
    VerifyOptions opts;
    opts.seed = 1000 + i;
    worst = std::max(worst, verify_round_trip(cd, opts).max_residual);
    const ConjugacyData self(cd.cert_a(), cd.cert_a());
    Rng rng(opts.seed);
    for (const auto& x : sample_points(self, opts, rng)) {
      same = std::max(same, lifted_distance(psi_forward(self, x), x, self.cert_a().form));
    }
  }
  const bool ok = worst <= 1e-6 && same <= 1e-10;
  return {ok, "max round-trip residual " + sci(worst) + ", A = B max deviation from identity " + sci(same)};
}

Outcome criterion_unstable() {
  const auto pairs = testing_support::stable_pairs(50, 4242);
  std::size_t agree = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Matrix a = negate_generator(pairs[i].first);
    const Matrix b = negate_generator(pairs[i].second);
    VerifyOptions opts;
    opts.seed = 2000 + i;
    const PairConjugacy pc = verify_pair(a, b, opts);
    if (pc.classification.verdict == PairVerdict::ConjugateUnstable && pc.residual) {
      ++agree;
      worst = std::max(worst, pc.residual->max_residual);
    }
  }
  const bool ok = agree == pairs.size() && worst <= 1e-6;
  return {ok, std::to_string(agree) + "/50 ConjugateUnstable, max residual of negated pairs " + sci(worst)};
}

// Independent oracle: roots of x^2 - tr x + det.
PairVerdict quadratic_oracle(const Matrix& a, const Matrix& b) {
  auto max_real = [](const Matrix& m) {
    const double tr = m.trace();
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = tr * tr - 4.0 * det;
    return disc >= 0.0 ? (tr + std::sqrt(disc)) / 2.0 : tr / 2.0;
  };
  auto min_real = [](const Matrix& m) {
    const double tr = m.trace();
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = tr * tr - 4.0 * det;
    return disc >= 0.0 ? (tr - std::sqrt(disc)) / 2.0 : tr / 2.0;
  };
  if (max_real(a) < 0.0 && max_real(b) < 0.0) return PairVerdict::ConjugateStable;
  if (min_real(a) > 0.0 && min_real(b) > 0.0) return PairVerdict::ConjugateUnstable;
  return PairVerdict::Inconclusive;
}

Outcome criterion_gl2() {
  Rng rng(777);
  std::size_t agree = 0;
  std::size_t sub_population = 0;
  std::size_t trace_agree = 0;
  std::size_t verdicts[3] = {0, 0, 0};
  for (int k = 0; k < 500; ++k) {
    Matrix a = rng.uniform_matrix(2, -2.0, 2.0);
    Matrix b = rng.uniform_matrix(2, -2.0, 2.0);
    if (k % 2 == 1) {
      // rotation-dominated pairs populate the (a-d)^2 + 4bc <= 0 branch
      const double s = rng.uniform() < 0.5 ? -1.0 : 1.0;
      a = Matrix{{s * rng.uniform(0.1, 1.0), -rng.uniform(1.0, 3.0)}, {rng.uniform(1.0, 3.0), s * rng.uniform(0.1, 1.0)}};
      const double sb = rng.uniform() < 0.8 ? s : -s;
      b = Matrix{{sb * rng.uniform(0.1, 1.0), rng.uniform(1.0, 3.0)}, {-rng.uniform(1.0, 3.0), sb * rng.uniform(0.1, 1.0)}};
    }
    const PairClassification cls = classify_gl2_pair(a, b);
    const PairVerdict oracle = quadratic_oracle(a, b);
    if (cls.verdict == oracle) ++agree;
    ++verdicts[static_cast<int>(oracle)];
    auto disc = [](const Matrix& m) { return (m(0, 0) - m(1, 1)) * (m(0, 0) - m(1, 1)) + 4.0 * m(0, 1) * m(1, 0); };
    if (disc(a) <= 0.0 && disc(b) <= 0.0) {
      ++sub_population;
      PairVerdict rule = PairVerdict::Inconclusive;
      if (a.trace() < 0.0 && b.trace() < 0.0) rule = PairVerdict::ConjugateStable;
      if (a.trace() > 0.0 && b.trace() > 0.0) rule = PairVerdict::ConjugateUnstable;
      if (cls.trace_rule_applies && rule == cls.verdict) ++trace_agree;
    }
  }
  const bool ok = agree == 500 && trace_agree == sub_population && sub_population > 0;
  return {ok, std::to_string(agree) + "/500 agree with quadratic oracle (stable " + std::to_string(verdicts[0]) +
                  ", unstable " + std::to_string(verdicts[1]) + ", inconclusive " + std::to_string(verdicts[2]) +
                  "); trace rule " + std::to_string(trace_agree) + "/" + std::to_string(sub_population)};
}

Outcome criterion_adjoint() {
  double inter = 0.0;
  double ode = 0.0;
  std::size_t algebras = 0;
  for (const auto& name : builtin_algebra_names()) {
    const LieAlgebraSpec spec = builtin_algebra(name);
    if (!spec.has_realization()) continue;
    ++algebras;
    Rng rng(31 + algebras);
    for (int k = 0; k < 10; ++k) {
      const AlgebraElement a{rng.uniform_vector(spec.dim(), -1.0, 1.0)};
      const AlgebraElement x0{rng.uniform_vector(spec.dim(), -0.5, 0.5)};
      const Matrix g0 = mat_exp(realize(spec, x0), 1.0);
      inter = std::max(inter, intertwining_check(spec, a, TimeGrid{}).max_residual);
      ode = std::max(ode, adjoint_ode_check(spec, a, g0, TimeGrid{}).max_residual);
    }
  }
  const bool ok = inter <= 1e-8 && ode <= 1e-5;
  return {ok, std::to_string(algebras) + " algebras x 10 A on t in [-3,3]: |Ad(e^{At}) - e^{t ad A}| " + sci(inter) +
                  ", ODE residual " + sci(ode)};
}

Outcome criterion_vacuity() {
  std::size_t audits = 0;
  std::size_t failures_reported = 0;
  double self_bracket = 0.0;
  double trace_ad = 0.0;
  bool trace_reported = true;
  for (const auto& name : builtin_algebra_names()) {
    const LieAlgebraSpec spec = builtin_algebra(name);
    const bool semisimple = is_semisimple(spec).semisimple;
    Rng rng(17);
    for (int k = 0; k < 20; ++k) {
      AlgebraElement a{rng.uniform_vector(spec.dim(), -1.0, 1.0)};
      const AlgebraElement b{rng.uniform_vector(spec.dim(), -1.0, 1.0)};
      if (norm2(a.coords) == 0.0) a.coords[0] = 1.0;
      const TransferAudit audit = semisimple_transfer_audit(spec, a, b, VerifyOptions{});
      ++audits;
      if (!audit.hypothesis_holds && !audit.witnesses.empty()) ++failures_reported;
      for (const auto& w : audit.witnesses) {
        self_bracket = std::max(self_bracket, w.self_bracket_residual);
        if (semisimple) {
          if (!w.trace_ad) trace_reported = false;
          else trace_ad = std::max(trace_ad, std::abs(*w.trace_ad));
        }
      }
    }
  }
  const bool ok = failures_reported == audits && self_bracket <= 1e-12 && trace_reported && trace_ad <= 1e-10;
  return {ok, std::to_string(failures_reported) + "/" + std::to_string(audits) +
                  " audits report failure; max |ad(A)A| " + sci(self_bracket) + ", max |tr ad A| (semisimple) " + sci(trace_ad)};
}

// Classical RK4 on h' = A h, w' = A w + b from the identity.
AffineElement rk4_affine(const AffineGenerator& x, double t, int steps) {
  const std::size_t n = x.a.n();
  AffineElement y = AffineElement::identity(n);
  const double dt = t / steps;
  auto f = [&](const AffineElement& s) { return AffineElement{x.a * s.h, add(x.a * s.w, x.b)}; };
  auto axpy = [](const AffineElement& s, double c, const AffineElement& k) {
    return AffineElement{s.h + c * k.h, add(s.w, scale(k.w, c))};
  };
  for (int i = 0; i < steps; ++i) {
    const AffineElement k1 = f(y);
    const AffineElement k2 = f(axpy(y, dt / 2, k1));
    const AffineElement k3 = f(axpy(y, dt / 2, k2));
    const AffineElement k4 = f(axpy(y, dt, k3));
    y = axpy(y, dt / 6, k1);
    y = axpy(y, dt / 3, k2);
    y = axpy(y, dt / 3, k3);
    y = axpy(y, dt / 6, k4);
  }
  return y;
}

Outcome criterion_affine() {
  Rng rng(2718);
  double ode = 0.0;
  double semi = 0.0;
  double axioms = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 3;
    const AffineGenerator x{rng.uniform_matrix(n, -1.0, 1.0), rng.uniform_vector(n, -1.0, 1.0)};
    const double t = rng.uniform(-2.0, 2.0);
    ode = std::max(ode, affine_distance(affine_exp(x, t), rk4_affine(x, t, 2000)));

    const AffineElement g{random_group_element(rng, n, 0.5), rng.uniform_vector(n, -1.0, 1.0)};
    const AffineElement h{random_group_element(rng, n, 0.5), rng.uniform_vector(n, -1.0, 1.0)};
    const AffineElement f{random_group_element(rng, n, 0.5), rng.uniform_vector(n, -1.0, 1.0)};
    const Matrix lhs = project(affine_flow(x, t, g));
    semi = std::max(semi, (lhs - linear_part_flow(x.a, t, project(g))).frobenius_norm());

    const AffineElement e = AffineElement::identity(n);
    axioms = std::max(axioms, affine_distance(affine_mul(affine_mul(g, h), f), affine_mul(g, affine_mul(h, f))));
    axioms = std::max(axioms, affine_distance(affine_mul(g, e), g));
    axioms = std::max(axioms, affine_distance(affine_mul(e, g), g));
    axioms = std::max(axioms, affine_distance(affine_mul(g, affine_inverse(g)), e));
    axioms = std::max(axioms, affine_distance(affine_mul(affine_inverse(g), g), e));
  }
  const bool ok = ode <= 1e-6 && semi <= 1e-10 && axioms <= 1e-10;
  return {ok, "exp vs RK4 " + sci(ode) + ", semiconjugacy " + sci(semi) + ", group axioms " + sci(axioms)};
}

Outcome criterion_cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "hypflow_acceptance";
  fs::create_directories(dir);
  const fs::path pair_file = dir / "pair.json";
  {
    std::ofstream out(pair_file);
    out << R"({"A": [[-1.0, 2.0, 0.0], [0.0, -1.5, 1.0], [0.5, 0.0, -2.0]],
              "B": [[-0.8, 0.0, 0.3], [1.0, -1.2, 0.0], [0.0, 0.4, -1.0]]})";
  }
  std::vector<cli::RunConfig> configs(3);
  configs[0].command = cli::Command::Certify;
  configs[0].input_path = pair_file.string();
  configs[1].command = cli::Command::ConjugacyVerify;
  configs[1].input_path = pair_file.string();
  configs[2].command = cli::Command::AlgebraAudit;
  configs[2].input_path = "builtin:sl2";
  std::size_t identical = 0;
  for (const auto& c : configs) {
    cli::RunConfig second = c;
    second.threads = 3;  // worker count must not leak into the report
    const cli::RunResult r1 = cli::run(c);
    const cli::RunResult r2 = cli::run(second);
    if (r1.exit_code != 2 && !r1.output.empty() && r1.output == r2.output && r1.exit_code == r2.exit_code) ++identical;
  }
  fs::remove_all(dir);
  return {identical == configs.size(), std::to_string(identical) + "/3 configs byte-identical across runs"};
}

}  // namespace

int main() {
  const auto cases = stable_population();
  report(1, "hyperbolic estimate", [&] { return criterion_hyperbolic_estimate(cases); });
  report(2, "crossing time", [&] { return criterion_crossing_time(cases); });
  report(3, "cocycle identity", [&] { return criterion_cocycle(cases); });
  report(4, "conjugacy identity", criterion_conjugacy);
  report(5, "homeomorphism round trip", criterion_round_trip);
  report(6, "unstable pairs", criterion_unstable);
  report(7, "GL(2) classification", criterion_gl2);
  report(8, "adjoint identities", criterion_adjoint);
  report(9, "hypothesis vacuity audit", criterion_vacuity);
  report(10, "affine flows", criterion_affine);
  report(11, "CLI determinism", criterion_cli_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
