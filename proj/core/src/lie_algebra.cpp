#include "hypflow/lie_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hypflow/error.hpp"

namespace hypflow {

LieAlgebraSpec::LieAlgebraSpec(std::string name, std::vector<std::string> basis,
                               const std::vector<Bracket>& brackets,
                               std::optional<std::vector<Matrix>> realization, const Tolerances& tol)
    : name_(std::move(name)), basis_(std::move(basis)), realization_(std::move(realization)) {
  const std::size_t d = basis_.size();
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "algebra dimension must be positive");
  c_.assign(d * d * d, 0.0);
  std::vector<bool> seen(d * d, false);
  for (const auto& br : brackets) {
    if (br.i >= d || br.j >= d) {
      throw Error(ErrorKind::InvalidArgument, "bracket index out of range");
    }
    if (br.coeffs.size() != d) {
      throw Error(ErrorKind::DimensionMismatch, "bracket [" + std::to_string(br.i) + "," +
                                                    std::to_string(br.j) + "] needs " +
                                                    std::to_string(d) + " coefficients");
    }
    if (!all_finite(br.coeffs)) throw Error(ErrorKind::NonFinite, "bracket coefficients");
    if (br.i == br.j) {
      if (norm2(br.coeffs) != 0.0) {
        throw Error(ErrorKind::InvalidArgument, "[e_i, e_i] must vanish");
      }
      continue;
    }
    for (std::size_t k = 0; k < d; ++k) {
      const double fwd = br.coeffs[k];
      if (seen[br.j * d + br.i] && c_[(br.j * d + br.i) * d + k] != -fwd) {
        throw Error(ErrorKind::InvalidArgument, "brackets [" + std::to_string(br.i) + "," +
                                                    std::to_string(br.j) +
                                                    "] and its reverse are not antisymmetric");
      }
      c_[(br.i * d + br.j) * d + k] = fwd;
      c_[(br.j * d + br.i) * d + k] = -fwd;
    }
    seen[br.i * d + br.j] = true;
  }
  double cmax = 0.0;
  for (double x : c_) cmax = std::max(cmax, std::abs(x));
  if (jacobi_residual() > tol.jacobi_residual * std::max(1.0, cmax * cmax)) {
    throw Error(ErrorKind::InvalidArgument,
                "structure constants violate the Jacobi identity (residual " +
                    std::to_string(jacobi_residual()) + ")");
  }
  if (realization_) {
    if (realization_->size() != d) {
      throw Error(ErrorKind::DimensionMismatch, "realization needs one matrix per basis element");
    }
    for (const auto& m : *realization_) {
      require_square(m, "realization");
      if (m.n() != realization_->front().n()) {
        throw Error(ErrorKind::DimensionMismatch, "realization matrices differ in size");
      }
    }
    if (realization_residual() > tol.realization_residual) {
      throw Error(ErrorKind::InvalidArgument,
                  "realization commutators do not match the structure constants (residual " +
                      std::to_string(realization_residual()) + ")");
    }
  }
}

const std::vector<Matrix>& LieAlgebraSpec::realization() const {
  if (!realization_) {
    throw Error(ErrorKind::InvalidArgument, "algebra '" + name_ + "' has no matrix realization");
  }
  return *realization_;
}

double LieAlgebraSpec::jacobi_residual() const {
  const std::size_t d = dim();
  double worst = 0.0;
  // [e_i,[e_j,e_k]] = sum_m c(j,k,m) [e_i, e_m] = sum_m c(j,k,m) c(i,m,p) e_p
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t p = 0; p < d; ++p) {
          double s = 0.0;
          for (std::size_t m = 0; m < d; ++m) {
            s += c(j, k, m) * c(i, m, p) + c(k, i, m) * c(j, m, p) + c(i, j, m) * c(k, m, p);
          }
          worst = std::max(worst, std::abs(s));
        }
      }
    }
  }
  return worst;
}

double LieAlgebraSpec::realization_residual() const {
  const auto& e = realization();
  const std::size_t d = dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Matrix diff = commutator(e[i], e[j]);
      for (std::size_t k = 0; k < d; ++k) diff -= c(i, j, k) * e[k];
      worst = std::max(worst, diff.frobenius_norm());
    }
  }
  return worst;
}

std::vector<LieAlgebraSpec::Bracket> LieAlgebraSpec::brackets() const {
  std::vector<Bracket> out;
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      Vector coeffs(d);
      for (std::size_t k = 0; k < d; ++k) coeffs[k] = c(i, j, k);
      if (norm2(coeffs) != 0.0) out.push_back({i, j, std::move(coeffs)});
    }
  }
  return out;
}

// --- built-in corpus ------------------------------------------------------------

std::vector<std::string> builtin_algebra_names() {
  return {"sl2", "so3", "heisenberg3", "abelian2", "gl2", "solvable2"};
}

namespace {

Matrix unit(std::size_t n, std::size_t i, std::size_t j) {
  Matrix m(n, n);
  m(i, j) = 1.0;
  return m;
}

}  // namespace

LieAlgebraSpec builtin_algebra(const std::string& name) {
  using B = LieAlgebraSpec::Bracket;
  if (name == "sl2") {
    // [H,E] = 2E, [H,F] = -2F, [E,F] = H
    return LieAlgebraSpec(name, {"H", "E", "F"},
                          {B{0, 1, {0, 2, 0}}, B{0, 2, {0, 0, -2}}, B{1, 2, {1, 0, 0}}},
                          std::vector<Matrix>{Matrix{{1, 0}, {0, -1}}, unit(2, 0, 1), unit(2, 1, 0)});
  }
  if (name == "so3") {
    // [e1,e2] = e3, [e2,e3] = e1, [e3,e1] = e2
    return LieAlgebraSpec(name, {"e1", "e2", "e3"},
                          {B{0, 1, {0, 0, 1}}, B{1, 2, {1, 0, 0}}, B{2, 0, {0, 1, 0}}},
                          std::vector<Matrix>{Matrix{{0, 0, 0}, {0, 0, -1}, {0, 1, 0}},
                                              Matrix{{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}},
                                              Matrix{{0, -1, 0}, {1, 0, 0}, {0, 0, 0}}});
  }
  if (name == "heisenberg3") {
    // [X,Y] = Z
    return LieAlgebraSpec(name, {"X", "Y", "Z"}, {B{0, 1, {0, 0, 1}}},
                          std::vector<Matrix>{unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)});
  }
  if (name == "abelian2") {
    return LieAlgebraSpec(name, {"e1", "e2"}, {}, std::vector<Matrix>{unit(2, 0, 0), unit(2, 1, 1)});
  }
  if (name == "gl2") {
    return LieAlgebraSpec(name, {"E11", "E12", "E21", "E22"},
                          {B{0, 1, {0, 1, 0, 0}}, B{0, 2, {0, 0, -1, 0}}, B{1, 2, {1, 0, 0, -1}},
                           B{1, 3, {0, 1, 0, 0}}, B{2, 3, {0, 0, -1, 0}}},
                          std::vector<Matrix>{unit(2, 0, 0), unit(2, 0, 1), unit(2, 1, 0), unit(2, 1, 1)});
  }
  if (name == "solvable2") {
    // [e1,e2] = e2
    return LieAlgebraSpec(name, {"e1", "e2"}, {B{0, 1, {0, 1}}},
                          std::vector<Matrix>{unit(2, 0, 0), unit(2, 0, 1)});
  }
  throw Error(ErrorKind::InvalidArgument, "unknown built-in algebra '" + name + "'");
}

// --- bracket, ad, Killing ---------------------------------------------------------

namespace {

void require_element(const LieAlgebraSpec& spec, const AlgebraElement& x) {
  if (x.coords.size() != spec.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "element has " + std::to_string(x.coords.size()) +
                                                  " coordinates, algebra '" + spec.name() +
                                                  "' has dimension " + std::to_string(spec.dim()));
  }
}

}  // namespace

AlgebraElement basis_element(const LieAlgebraSpec& spec, std::size_t i) {
  AlgebraElement e{Vector(spec.dim(), 0.0)};
  e.coords.at(i) = 1.0;
  return e;
}

AlgebraElement bracket(const LieAlgebraSpec& spec, const AlgebraElement& x, const AlgebraElement& y) {
  require_element(spec, x);
  require_element(spec, y);
  const std::size_t d = spec.dim();
  AlgebraElement z{Vector(d, 0.0)};
  for (std::size_t i = 0; i < d; ++i) {
    if (x.coords[i] == 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      const double w = x.coords[i] * y.coords[j];
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) z.coords[k] += w * spec.c(i, j, k);
    }
  }
  return z;
}

Matrix ad_matrix(const LieAlgebraSpec& spec, const AlgebraElement& x) {
  require_element(spec, x);
  const std::size_t d = spec.dim();
  Matrix m(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += x.coords[i] * spec.c(i, j, k);
      m(k, j) = s;
    }
  }
  return m;
}

Matrix killing_gram(const LieAlgebraSpec& spec) {
  const std::size_t d = spec.dim();
  std::vector<Matrix> ads;
  for (std::size_t i = 0; i < d; ++i) ads.push_back(ad_matrix(spec, basis_element(spec, i)));
  Matrix k(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      k(i, j) = k(j, i) = (ads[i] * ads[j]).trace();
    }
  }
  return k;
}

double killing_form(const LieAlgebraSpec& spec, const AlgebraElement& x, const AlgebraElement& y) {
  return (ad_matrix(spec, x) * ad_matrix(spec, y)).trace();
}

SemisimplicityVerdict is_semisimple(const LieAlgebraSpec& spec, const Tolerances& tol) {
  const Matrix gram = killing_gram(spec);
  SemisimplicityVerdict v;
  v.determinant = determinant(gram);
  v.threshold = tol.semisimple_rel * std::pow(gram.frobenius_norm(), static_cast<double>(spec.dim()));
  v.semisimple = std::abs(v.determinant) > v.threshold;
  if (!v.semisimple) {
    // central elements lie in the radical of the Killing form; prefer them
    for (std::size_t i = 0; i < spec.dim(); ++i) {
      if (ad_matrix(spec, basis_element(spec, i)).max_abs() == 0.0) {
        v.null_vector = basis_element(spec, i).coords;
        return v;
      }
    }
    const SymmetricEigen eig = symmetric_eigen(gram);
    std::size_t best = 0;
    for (std::size_t k = 1; k < eig.values.size(); ++k) {
      if (std::abs(eig.values[k]) < std::abs(eig.values[best])) best = k;
    }
    Vector nv(spec.dim());
    for (std::size_t i = 0; i < spec.dim(); ++i) nv[i] = eig.vectors(i, best);
    v.null_vector = std::move(nv);
  }
  return v;
}

// --- group side ---------------------------------------------------------------

Matrix realize(const LieAlgebraSpec& spec, const AlgebraElement& x) {
  require_element(spec, x);
  const auto& e = spec.realization();
  Matrix m(e.front().n(), e.front().n());
  for (std::size_t i = 0; i < spec.dim(); ++i) m += x.coords[i] * e[i];
  return m;
}

Matrix big_ad(const LieAlgebraSpec& spec, const Matrix& g, const Tolerances& tol) {
  const auto& e = spec.realization();
  require_same_shape(g, e.front(), "big_ad");
  const LuDecomposition lu(g);
  if (lu.singular()) throw Error(ErrorKind::InvalidArgument, "big_ad: group element is singular");
  const Matrix g_inv = lu.solve(Matrix::identity(g.n()));
  std::vector<Vector> columns;
  columns.reserve(e.size());
  for (const auto& m : e) columns.push_back(m.flat());
  const std::size_t d = spec.dim();
  Matrix out(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    const Matrix conj = g * e[j] * g_inv;
    const Projection p = project_onto_span(columns, conj.flat());
    if (p.residual > tol.span_residual * std::max(1.0, conj.frobenius_norm())) {
      throw Error(ErrorKind::NotInSpan, "g " + spec.basis()[j] + " g^-1 leaves the realized algebra '" +
                                            spec.name() + "' (residual " + std::to_string(p.residual) + ")");
    }
    for (std::size_t i = 0; i < d; ++i) out(i, j) = p.coeffs[i];
  }
  return out;
}

GridResidual adjoint_ode_check(const LieAlgebraSpec& spec, const AlgebraElement& a, const Matrix& g0,
                               const TimeGrid& grid, const Tolerances& tol) {
  const Matrix a_mat = realize(spec, a);
  const Matrix ad_a = ad_matrix(spec, a);
  const double h = tol.fd_step;
  auto orbit = [&](double t) { return big_ad(spec, mat_exp(a_mat, t) * g0, tol); };
  GridResidual out;
  for (double t : grid.points()) {
    const Matrix derivative = (orbit(t + h) - orbit(t - h)) * (0.5 / h);
    const double r = (derivative - ad_a * orbit(t)).frobenius_norm();
    if (r > out.max_residual || out.grid_points == 0) {
      out.max_residual = r;
      out.argmax_t = t;
    }
    ++out.grid_points;
  }
  return out;
}

GridResidual intertwining_check(const LieAlgebraSpec& spec, const AlgebraElement& a, const TimeGrid& grid,
                                const Tolerances& tol) {
  const Matrix a_mat = realize(spec, a);
  const Matrix ad_a = ad_matrix(spec, a);
  GridResidual out;
  for (double t : grid.points()) {
    const double r = (big_ad(spec, mat_exp(a_mat, t), tol) - mat_exp(ad_a, t)).frobenius_norm();
    if (r > out.max_residual || out.grid_points == 0) {
      out.max_residual = r;
      out.argmax_t = t;
    }
    ++out.grid_points;
  }
  return out;
}

// --- transfer audit ----------------------------------------------------------------

TransferAudit transfer_audit_from_ad(const std::string& name, const SemisimplicityVerdict& verdict,
                                     const Matrix& ad_a, const Matrix& ad_b, const Vector& a_coords,
                                     const Vector& b_coords, const VerifyOptions& options) {
  TransferAudit audit;
  audit.algebra = name;
  audit.semisimplicity = verdict;
  audit.spectrum_a = spectrum(ad_a);
  audit.spectrum_b = spectrum(ad_b);
  audit.hypothesis_holds = audit.spectrum_a.abscissa < 0.0 && audit.spectrum_b.abscissa < 0.0;

  auto witness = [&](const char* label, const Matrix& ad, const Vector& coords, const Spectrum& sp) {
    HypothesisWitness w;
    w.element = label;
    w.leading = sp.leading();
    w.abscissa = sp.abscissa;
    w.kernel_vector = coords;
    w.self_bracket_residual = norm2(ad * coords);
    if (verdict.semisimple) w.trace_ad = ad.trace();
    return w;
  };
  if (!(audit.spectrum_a.abscissa < 0.0)) audit.witnesses.push_back(witness("A", ad_a, a_coords, audit.spectrum_a));
  if (!(audit.spectrum_b.abscissa < 0.0)) audit.witnesses.push_back(witness("B", ad_b, b_coords, audit.spectrum_b));

  if (audit.hypothesis_holds) {
    const ConjugacyData cd(certify(ad_a, AlgebraSlot::Matrix), certify(ad_b, AlgebraSlot::Matrix));
    audit.conjugacy = verify_conjugacy(cd, options);
  }
  return audit;
}

TransferAudit semisimple_transfer_audit(const LieAlgebraSpec& spec, const AlgebraElement& a,
                                        const AlgebraElement& b, const VerifyOptions& options) {
  VerifyOptions opts = options;
  if (!opts.group_sampler && spec.has_realization()) {
    // points of Ad(G): Ad(e^{X}) for random X in the algebra
    opts.group_sampler = [&spec, scale = options.group_entry_scale](Rng& rng) {
      const AlgebraElement x{rng.uniform_vector(spec.dim(), -scale, scale)};
      return big_ad(spec, mat_exp(realize(spec, x), 1.0));
    };
  }
  return transfer_audit_from_ad(spec.name(), is_semisimple(spec), ad_matrix(spec, a), ad_matrix(spec, b),
                                a.coords, b.coords, opts);
}

// --- distance decay ---------------------------------------------------------------

const char* to_string(DecayStatus s) {
  switch (s) {
    case DecayStatus::Bounded: return "Bounded";
    case DecayStatus::Unsatisfiable: return "Unsatisfiable";
    case DecayStatus::Trivial: return "Trivial";
  }
  return "Unsatisfiable";
}

DecayStatus decay_status_from_string(const std::string& s) {
  if (s == "Bounded") return DecayStatus::Bounded;
  if (s == "Unsatisfiable") return DecayStatus::Unsatisfiable;
  if (s == "Trivial") return DecayStatus::Trivial;
  throw Error(ErrorKind::InvalidArgument, "unknown decay status '" + s + "'");
}

DecayReport decay_on_linear_path(const Matrix& m, const Matrix& x0, const TimeGrid& grid) {
  require_square(m, "decay_on_linear_path");
  require_same_shape(m, x0, "decay_on_linear_path");
  const Matrix id = Matrix::identity(m.n());
  DecayReport report;
  report.abscissa = spectrum(m).abscissa;
  report.rate = std::abs(report.abscissa);
  // distances at roundoff level of |Id|_F count as zero
  const double floor = 1e-12 * id.frobenius_norm();
  auto snap = [floor](double d) { return d <= floor ? 0.0 : d; };
  report.initial_distance = snap((x0 - id).frobenius_norm());
  for (double t : grid.points()) {
    if (t < 0.0) continue;
    const double dist = snap((mat_exp(m, t) * x0 - id).frobenius_norm());
    report.curve.push_back({t, dist, std::exp(-report.rate * t) * report.initial_distance});
  }
  if (report.curve.empty()) throw Error(ErrorKind::InvalidArgument, "decay check needs grid points t >= 0");

  const bool flat = std::all_of(report.curve.begin(), report.curve.end(),
                                [](const DecayPoint& p) { return p.distance == 0.0; });
  if (report.initial_distance == 0.0 && flat) {
    report.status = DecayStatus::Trivial;
    report.constant = 0.0;
  } else if (report.abscissa >= 0.0 || report.initial_distance == 0.0) {
    report.status = DecayStatus::Unsatisfiable;
  } else {
    double c = 0.0;
    for (const auto& p : report.curve) c = std::max(c, p.distance / p.bound);
    report.status = DecayStatus::Bounded;
    report.constant = c;
  }
  return report;
}

DecayReport adjoint_decay_check(const LieAlgebraSpec& spec, const AlgebraElement& a, const Matrix& g0,
                                const TimeGrid& grid, const Tolerances& tol) {
  return decay_on_linear_path(ad_matrix(spec, a), big_ad(spec, g0, tol), grid);
}

}  // namespace hypflow
