#include "hypflow/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "hypflow/error.hpp"

namespace hypflow {

ConjugacyData::ConjugacyData(HyperbolicityCertificate cert_a, HyperbolicityCertificate cert_b)
    : a_(std::move(cert_a)), b_(std::move(cert_b)) {
  if (!(a_.abscissa < 0.0) || !(b_.abscissa < 0.0)) {
    throw Error(ErrorKind::NotHyperbolic, "conjugacy data needs two stable certificates");
  }
  if (a_.generator.n() != b_.generator.n() || a_.slot_dim() != b_.slot_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "certificates have different dimensions");
  }
}

std::vector<double> TimeGrid::points() const {
  validate();
  std::vector<double> out(steps);
  const double h = (t_max - t_min) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) out[i] = t_min + h * static_cast<double>(i);
  out.back() = t_max;
  return out;
}

void TimeGrid::validate() const {
  if (!(t_min < t_max)) throw Error(ErrorKind::InvalidArgument, "time grid needs t_min < t_max");
  if (steps < 2) throw Error(ErrorKind::InvalidArgument, "time grid needs at least 2 points");
}

Vector h0(const ConjugacyData& cd, std::span<const double> w) {
  const double nw = p_norm(cd.cert_b().form, w);
  if (nw == 0.0) throw Error(ErrorKind::ZeroVector, "h0 is undefined at 0");
  return scale(w, 1.0 / nw);
}

namespace {

bool commute(const Matrix& a, const Matrix& b) {
  const double bound = 4.0 * std::numeric_limits<double>::epsilon() * a.frobenius_norm() *
                       b.frobenius_norm();
  return commutator(a, b).frobenius_norm() <= bound;
}

// Carries x along `from` to its unit-sphere crossing, normalizes there in
// the `to` norm, and flows back along `to` for the same time.
LiftedPoint transport(const HyperbolicityCertificate& from, const HyperbolicityCertificate& to,
                      const LiftedPoint& x) {
  require_same_shape(from.generator, x.g, "conjugacy map");
  if (x.v.size() != from.slot_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "conjugacy map: algebra slot size");
  }
  if (norm2(x.v) == 0.0) return {x.g, Vector(x.v.size(), 0.0)};
  const double tau = crossing_time(from, x);
  const Matrix e_from = mat_exp(from.generator, tau);
  const Vector on_sphere = act(e_from, x.v);
  const double to_norm = p_norm(to.form, on_sphere);
  LiftedPoint y;
  if (commute(from.generator, to.generator)) {
    // e^{-B tau} e^{A tau} = e^{(A - B) tau} when A and B commute
    const Matrix m = mat_exp(from.generator - to.generator, tau);
    y.g = m * x.g;
    y.v = scale(act(m, x.v), 1.0 / to_norm);
  } else {
    const Matrix e_back = mat_exp(to.generator, -tau);
    y.g = e_back * (e_from * x.g);
    y.v = act(e_back, scale(on_sphere, 1.0 / to_norm));
  }
  if (!y.g.all_finite() || !all_finite(y.v)) {
    throw Error(ErrorKind::NonFinite, "conjugacy map overflowed");
  }
  return y;
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(jobs, 1)));
}

// Runs body(i) for i in [0, jobs) on a fixed partition; rethrows the first
// failure by index.
template <typename Body>
void parallel_for(std::size_t jobs, unsigned threads, Body body) {
  const unsigned workers = worker_count(threads, jobs);
  std::vector<std::exception_ptr> errors(jobs);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run_range(0, jobs);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (jobs + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(jobs, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

LiftedPoint psi_forward(const ConjugacyData& cd, const LiftedPoint& x) {
  return transport(cd.cert_a(), cd.cert_b(), x);
}

LiftedPoint psi_inverse(const ConjugacyData& cd, const LiftedPoint& y) {
  return transport(cd.cert_b(), cd.cert_a(), y);
}

double lifted_distance(const LiftedPoint& x, const LiftedPoint& reference, const SpdForm& form) {
  const double dg = (x.g - reference.g).frobenius_norm() /
                    std::max(1.0, reference.g.frobenius_norm());
  const double dv = p_norm(form, sub(x.v, reference.v)) / std::max(1.0, p_norm(form, reference.v));
  return dg + dv;
}

std::vector<LiftedPoint> sample_points(const ConjugacyData& cd, const VerifyOptions& options, Rng& rng) {
  if (options.samples < 1) throw Error(ErrorKind::InvalidArgument, "samples must be >= 1");
  const std::size_t n = cd.n();
  const std::size_t dim = cd.cert_a().slot_dim();
  const double log_lo = std::log(options.radius_min);
  const double log_hi = std::log(options.radius_max);
  std::vector<LiftedPoint> points;
  points.reserve(options.samples);
  for (std::size_t s = 0; s < options.samples; ++s) {
    LiftedPoint x;
    x.g = options.group_sampler ? options.group_sampler(rng)
                                : random_group_element(rng, n, options.group_entry_scale);
    Vector dir = rng.normal_vector(dim);
    while (norm2(dir) == 0.0) dir = rng.normal_vector(dim);
    const double radius = std::exp(rng.uniform(log_lo, log_hi));
    x.v = scale(dir, radius / p_norm(cd.cert_a().form, dir));
    points.push_back(std::move(x));
  }
  return points;
}

ResidualReport verify_conjugacy(const ConjugacyData& cd, const VerifyOptions& options,
                                std::vector<ResidualSample>* trace) {
  const std::vector<double> grid = options.grid.points();
  Rng rng(options.seed);
  const std::vector<LiftedPoint> points = sample_points(cd, options, rng);
  const Matrix& a = cd.cert_a().generator;
  const Matrix& b = cd.cert_b().generator;

  std::vector<std::vector<double>> residuals(points.size(), std::vector<double>(grid.size()));
  parallel_for(points.size(), options.threads, [&](std::size_t s) {
    const LiftedPoint image = psi_forward(cd, points[s]);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const LiftedPoint lhs = psi_forward(cd, lifted_flow(a, grid[k], points[s]));
      const LiftedPoint rhs = lifted_flow(b, grid[k], image);
      residuals[s][k] = lifted_distance(lhs, rhs, cd.cert_b().form);
    }
  });

  ResidualReport report;
  report.samples = points.size();
  report.grid_points = grid.size();
  report.seed = options.seed;
  report.max_residual = -1.0;
  for (std::size_t s = 0; s < points.size(); ++s) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double r = residuals[s][k];
      if (trace) trace->push_back({s, grid[k], r});
      if (r > report.max_residual || std::isnan(r)) {
        report.max_residual = r;
        report.argmax_t = grid[k];
        report.argmax_point = points[s];
      }
    }
  }
  return report;
}

ResidualReport verify_round_trip(const ConjugacyData& cd, const VerifyOptions& options) {
  Rng rng(options.seed);
  const std::vector<LiftedPoint> points = sample_points(cd, options, rng);
  std::vector<double> residuals(points.size());
  parallel_for(points.size(), options.threads, [&](std::size_t s) {
    const LiftedPoint back = psi_inverse(cd, psi_forward(cd, points[s]));
    residuals[s] = lifted_distance(back, points[s], cd.cert_a().form);
  });
  ResidualReport report;
  report.samples = points.size();
  report.grid_points = 1;
  report.seed = options.seed;
  report.max_residual = -1.0;
  for (std::size_t s = 0; s < points.size(); ++s) {
    if (residuals[s] > report.max_residual || std::isnan(residuals[s])) {
      report.max_residual = residuals[s];
      report.argmax_point = points[s];
    }
  }
  return report;
}

// --- classification ----------------------------------------------------------------

const char* to_string(PairVerdict v) {
  switch (v) {
    case PairVerdict::ConjugateStable: return "ConjugateStable";
    case PairVerdict::ConjugateUnstable: return "ConjugateUnstable";
    case PairVerdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

PairVerdict pair_verdict_from_string(const std::string& s) {
  if (s == "ConjugateStable") return PairVerdict::ConjugateStable;
  if (s == "ConjugateUnstable") return PairVerdict::ConjugateUnstable;
  if (s == "Inconclusive") return PairVerdict::Inconclusive;
  throw Error(ErrorKind::InvalidArgument, "unknown verdict '" + s + "'");
}

Matrix negate_generator(const Matrix& a) { return -a; }

PairClassification classify_pair(const Matrix& a, const Matrix& b) {
  require_square(a, "classify_pair");
  require_same_shape(a, b, "classify_pair");
  PairClassification c;
  c.spectrum_a = spectrum(a);
  c.spectrum_b = spectrum(b);
  if (c.spectrum_a.abscissa < 0.0 && c.spectrum_b.abscissa < 0.0) {
    c.verdict = PairVerdict::ConjugateStable;
  } else if (spectrum(negate_generator(a)).abscissa < 0.0 &&
             spectrum(negate_generator(b)).abscissa < 0.0) {
    c.verdict = PairVerdict::ConjugateUnstable;
  }
  return c;
}

PairClassification classify_gl2_pair(const Matrix& a, const Matrix& b) {
  if (a.rows() != 2 || a.cols() != 2 || b.rows() != 2 || b.cols() != 2) {
    throw Error(ErrorKind::DimensionMismatch, "classify_gl2_pair needs two 2x2 matrices");
  }
  PairClassification c = classify_pair(a, b);
  auto disc = [](const Matrix& m) {
    const double d = m(0, 0) - m(1, 1);
    return d * d + 4.0 * m(0, 1) * m(1, 0);
  };
  c.gl2 = true;
  c.trace_a = a.trace();
  c.trace_b = b.trace();
  c.discriminant_a = disc(a);
  c.discriminant_b = disc(b);
  c.trace_rule_applies = c.discriminant_a <= 0.0 && c.discriminant_b <= 0.0;
  if (c.trace_rule_applies) {
    if (c.trace_a < 0.0 && c.trace_b < 0.0) {
      c.trace_rule = "trace-negative";
    } else if (c.trace_a > 0.0 && c.trace_b > 0.0) {
      c.trace_rule = "trace-positive";
    }
  }
  return c;
}

PairConjugacy verify_pair(const Matrix& a, const Matrix& b, const VerifyOptions& options) {
  PairConjugacy out{classify_pair(a, b), std::nullopt};
  switch (out.classification.verdict) {
    case PairVerdict::ConjugateStable:
      out.residual = verify_conjugacy(ConjugacyData(certify(a), certify(b)), options);
      break;
    case PairVerdict::ConjugateUnstable:
      // Phi_{-A}(t) = Phi_A(-t): a conjugacy of the negated flows conjugates the originals.
      out.residual = verify_conjugacy(
          ConjugacyData(certify(negate_generator(a)), certify(negate_generator(b))), options);
      break;
    case PairVerdict::Inconclusive:
      break;
  }
  return out;
}

}  // namespace hypflow
