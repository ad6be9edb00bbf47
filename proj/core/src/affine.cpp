#include "hypflow/affine.hpp"

#include <cmath>
#include <string>

#include "hypflow/error.hpp"
#include "hypflow/random.hpp"

namespace hypflow {

namespace {

void require_element(const AffineElement& x, const char* what) {
  require_square(x.h, what);
  if (x.w.size() != x.h.n()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": translation part has " +
                                                  std::to_string(x.w.size()) + " entries, expected " +
                                                  std::to_string(x.h.n()));
  }
}

}  // namespace

AffineElement AffineElement::identity(std::size_t n) { return {Matrix::identity(n), Vector(n, 0.0)}; }

AffineElement affine_mul(const AffineElement& x, const AffineElement& y) {
  require_element(x, "affine_mul");
  require_element(y, "affine_mul");
  require_same_shape(x.h, y.h, "affine_mul");
  return {x.h * y.h, add(x.w, x.h * y.w)};
}

AffineElement affine_inverse(const AffineElement& x) {
  require_element(x, "affine_inverse");
  const Matrix h_inv = inverse(x.h);
  return {h_inv, scale(h_inv * x.w, -1.0)};
}

Vector affine_action(const AffineElement& x, std::span<const double> w) {
  require_element(x, "affine_action");
  return add(x.h * w, x.w);
}

AffineElement affine_exp(const AffineGenerator& x, double t) {
  require_square(x.a, "affine_exp");
  const std::size_t n = x.a.n();
  if (x.b.size() != n) throw Error(ErrorKind::DimensionMismatch, "affine_exp: b has wrong size");
  Matrix aug(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = x.a(i, j);
    aug(i, n) = x.b[i];
  }
  const Matrix e = mat_exp(aug, t);
  AffineElement out{Matrix(n, n), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.h(i, j) = e(i, j);
    out.w[i] = e(i, n);
  }
  return out;
}

AffineElement affine_flow(const AffineGenerator& x, double t, const AffineElement& g) {
  return affine_mul(affine_exp(x, t), g);
}

Matrix project(const AffineElement& g) { return g.h; }

Matrix linear_part_flow(const Matrix& a, double t, const Matrix& h) { return mat_exp(a, t) * h; }

double affine_distance(const AffineElement& x, const AffineElement& y) {
  return (x.h - y.h).frobenius_norm() + norm2(sub(x.w, y.w));
}

std::size_t count_level_crossings(std::span<const double> values, double level) {
  std::size_t count = 0;
  int prev = 0;
  for (double v : values) {
    const int sign = v > level ? 1 : (v < level ? -1 : 0);
    if (sign == 0) continue;
    if (prev != 0 && sign != prev) ++count;
    prev = sign;
  }
  return count;
}

TransversalityReport transversality(const std::vector<std::function<double(double)>>& curves,
                                    const TimeGrid& grid) {
  const std::vector<double> ts = grid.points();
  TransversalityReport report;
  report.grid_points = ts.size();
  report.transversal = !curves.empty();
  std::vector<double> values(ts.size());
  for (const auto& f : curves) {
    for (std::size_t k = 0; k < ts.size(); ++k) values[k] = f(ts[k]);
    const std::size_t c = count_level_crossings(values, 1.0);
    report.crossings.push_back(c);
    report.transversal = report.transversal && c == 1;
  }
  return report;
}

TransversalityReport transversality_linear(const Matrix& m, const SpdForm& form,
                                           const std::vector<Vector>& initial, const TimeGrid& grid) {
  std::vector<std::function<double(double)>> curves;
  for (const auto& v : initial) {
    curves.emplace_back([&m, &form, v](double t) { return p_norm(form, mat_exp(m, t) * v); });
  }
  return transversality(curves, grid);
}

AffineAudit affine_hypothesis_audit(const LieAlgebraSpec& spec_h, const AffineAlgebraGenerator& x1,
                                    const AffineAlgebraGenerator& x2, const AffineAuditOptions& options) {
  AffineAudit audit;
  audit.hypothesis = semisimple_transfer_audit(spec_h, x1.a, x2.a, options.verify);

  const std::size_t n = spec_h.realization_n();
  const AffineGenerator g1{realize(spec_h, x1.a), x1.b};
  const AffineGenerator g2{realize(spec_h, x2.a), x2.b};
  if (g1.b.size() != n || g2.b.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "affine generator translation part has wrong size");
  }
  Rng rng(options.seed);
  std::vector<AffineElement> starts;
  for (std::size_t s = 0; s < options.samples; ++s) {
    const AlgebraElement x{rng.uniform_vector(spec_h.dim(), -options.entry_scale, options.entry_scale)};
    starts.push_back({mat_exp(realize(spec_h, x), 1.0), rng.uniform_vector(n, -1.0, 1.0)});
  }
  const AffineElement center = AffineElement::identity(n);
  auto curves_for = [&](const AffineGenerator& gen) {
    std::vector<std::function<double(double)>> curves;
    for (const auto& g : starts) {
      curves.emplace_back([&gen, &center, g](double t) { return affine_distance(affine_flow(gen, t, g), center); });
    }
    return curves;
  };
  audit.transversality_1 = transversality(curves_for(g1), options.grid);
  audit.transversality_2 = transversality(curves_for(g2), options.grid);
  return audit;
}

}  // namespace hypflow
