#include "hypflow/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hypflow/error.hpp"

namespace hypflow {

namespace {

void write_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

void write(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        out += Json(it.key()).dump();
        out += ": ";
        write(out, it.value(), indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += inner;
        write(out, e, indent + 1);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, std::string("expected an object holding '") + name + "'");
  const auto it = j.find(name);
  if (it == j.end()) throw Error(ErrorKind::InvalidArgument, std::string("missing field '") + name + "'");
  return *it;
}

template <typename Fn>
auto in_field(const Json& j, const char* name, Fn fn) {
  const Json& f = field(j, name);
  try {
    return fn(f);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("field '") + name + "': " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("field '") + name + "': " + e.what());
  }
}

double number(const Json& j) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) throw Error(ErrorKind::InvalidArgument, "expected a number");
  return j.get<double>();
}

Json opt_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string kind_of(AlgebraSlot s) { return s == AlgebraSlot::Vector ? "vector" : "matrix"; }

}  // namespace

std::string dump_canonical(const Json& j) {
  std::string out;
  write(out, j, 0);
  out += "\n";
  return out;
}

// --- matrices ---------------------------------------------------------------------

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::InvalidArgument, "matrix must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw Error(ErrorKind::InvalidArgument, "matrix row " + std::to_string(i) + " is not an array");
    std::vector<double> row;
    for (const auto& x : j[i]) {
      if (!x.is_number()) throw Error(ErrorKind::InvalidArgument, "matrix row " + std::to_string(i) + " has a non-number");
      const double v = x.get<double>();
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "matrix entry is not finite");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return Matrix::from_rows(rows);
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "vector must be an array");
  Vector v;
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorKind::InvalidArgument, "vector has a non-number entry");
    v.push_back(x.get<double>());
  }
  if (!all_finite(v)) throw Error(ErrorKind::NonFinite, "vector entry is not finite");
  return v;
}

void to_json(Json& j, const Matrix& m) { j = matrix_to_json(m); }
void from_json(const Json& j, Matrix& m) { m = matrix_from_json(j); }

void to_json(Json& j, const LiftedPoint& x) { j = Json{{"g", matrix_to_json(x.g)}, {"v", x.v}}; }

void from_json(const Json& j, LiftedPoint& x) {
  x.g = in_field(j, "g", matrix_from_json);
  x.v = in_field(j, "v", vector_from_json);
}

void to_json(Json& j, const AffineElement& x) { j = Json{{"h", matrix_to_json(x.h)}, {"w", x.w}}; }

void from_json(const Json& j, AffineElement& x) {
  x.h = in_field(j, "h", matrix_from_json);
  x.w = in_field(j, "w", vector_from_json);
}

void to_json(Json& j, const AffineGenerator& x) { j = Json{{"A", matrix_to_json(x.a)}, {"b", x.b}}; }

void from_json(const Json& j, AffineGenerator& x) {
  x.a = in_field(j, "A", matrix_from_json);
  x.b = in_field(j, "b", vector_from_json);
}

// --- spectra and certificates ---------------------------------------------------------

void to_json(Json& j, const Spectrum& s) {
  Json eig = Json::array();
  for (const auto& mu : s.eigenvalues) eig.push_back(Json{{"re", mu.real()}, {"im", mu.imag()}});
  j = Json{{"abscissa", s.abscissa}, {"eigenvalues", eig}};
}

void from_json(const Json& j, Spectrum& s) {
  s.abscissa = in_field(j, "abscissa", number);
  s.eigenvalues.clear();
  for (const auto& e : field(j, "eigenvalues")) {
    s.eigenvalues.emplace_back(in_field(e, "re", number), in_field(e, "im", number));
  }
}

void to_json(Json& j, const HyperbolicityCertificate& c) {
  j = Json{{"generator", matrix_to_json(c.generator)},
           {"P", matrix_to_json(c.form.P)},
           {"rate", c.form.rate},
           {"lambda_max", c.form.lambda_max},
           {"abscissa", c.abscissa},
           {"slot", kind_of(c.slot)}};
}

void from_json(const Json& j, HyperbolicityCertificate& c) {
  c.generator = in_field(j, "generator", matrix_from_json);
  c.form.P = in_field(j, "P", matrix_from_json);
  c.form.rate = in_field(j, "rate", number);
  c.form.lambda_max = in_field(j, "lambda_max", number);
  c.abscissa = in_field(j, "abscissa", number);
  c.slot = in_field(j, "slot", [](const Json& s) { return s.get<std::string>(); }) == "matrix"
               ? AlgebraSlot::Matrix
               : AlgebraSlot::Vector;
}

// --- residual reports --------------------------------------------------------------------

void to_json(Json& j, const ResidualReport& r) {
  j = Json{{"max_residual", opt_number(r.max_residual)},
           {"argmax", Json{{"t", r.argmax_t}, {"g", matrix_to_json(r.argmax_point.g)}, {"v", r.argmax_point.v}}},
           {"samples", r.samples},
           {"grid_points", r.grid_points},
           {"seed", r.seed}};
}

void from_json(const Json& j, ResidualReport& r) {
  r.max_residual = in_field(j, "max_residual", number);
  const Json& arg = field(j, "argmax");
  r.argmax_t = in_field(arg, "t", number);
  from_json(arg, r.argmax_point);
  r.samples = in_field(j, "samples", [](const Json& x) { return x.get<std::size_t>(); });
  r.grid_points = in_field(j, "grid_points", [](const Json& x) { return x.get<std::size_t>(); });
  r.seed = in_field(j, "seed", [](const Json& x) { return x.get<std::uint64_t>(); });
}

void to_json(Json& j, const PairClassification& c) {
  j = Json{{"verdict", to_string(c.verdict)}, {"spectrum_A", c.spectrum_a}, {"spectrum_B", c.spectrum_b}};
  if (c.gl2) {
    j["gl2"] = Json{{"trace_A", c.trace_a},
                    {"trace_B", c.trace_b},
                    {"discriminant_A", c.discriminant_a},
                    {"discriminant_B", c.discriminant_b},
                    {"trace_rule_applies", c.trace_rule_applies},
                    {"trace_rule", c.trace_rule}};
  }
}

void from_json(const Json& j, PairClassification& c) {
  c.verdict = pair_verdict_from_string(field(j, "verdict").get<std::string>());
  from_json(field(j, "spectrum_A"), c.spectrum_a);
  from_json(field(j, "spectrum_B"), c.spectrum_b);
  c.gl2 = j.contains("gl2");
  if (c.gl2) {
    const Json& g = j["gl2"];
    c.trace_a = in_field(g, "trace_A", number);
    c.trace_b = in_field(g, "trace_B", number);
    c.discriminant_a = in_field(g, "discriminant_A", number);
    c.discriminant_b = in_field(g, "discriminant_B", number);
    c.trace_rule_applies = field(g, "trace_rule_applies").get<bool>();
    c.trace_rule = field(g, "trace_rule").get<std::string>();
  }
}

// --- Lie audits ------------------------------------------------------------------------------

void to_json(Json& j, const SemisimplicityVerdict& v) {
  j = Json{{"semisimple", v.semisimple}, {"killing_determinant", v.determinant}, {"threshold", v.threshold}};
  if (v.null_vector) j["null_vector"] = *v.null_vector;
}

void to_json(Json& j, const HypothesisWitness& w) {
  j = Json{{"element", w.element},
           {"leading_eigenvalue", Json{{"re", w.leading.real()}, {"im", w.leading.imag()}}},
           {"abscissa", w.abscissa},
           {"kernel_vector", w.kernel_vector},
           {"self_bracket_residual", w.self_bracket_residual},
           {"statement", "ad(A)A = 0: A spans a zero eigenvalue of ad(A)"}};
  if (w.trace_ad) j["trace_ad"] = *w.trace_ad;
}

void to_json(Json& j, const TransferAudit& a) {
  j = Json{{"algebra", a.algebra},
           {"semisimplicity", a.semisimplicity},
           {"spectrum_adA", a.spectrum_a},
           {"spectrum_adB", a.spectrum_b},
           {"hypothesis_holds", a.hypothesis_holds},
           {"witnesses", a.witnesses}};
  j["conjugacy"] = a.conjugacy ? Json(*a.conjugacy) : Json(nullptr);
}

void to_json(Json& j, const DecayReport& r) {
  Json curve = Json::array();
  for (const auto& p : r.curve) curve.push_back(Json{{"t", p.t}, {"distance", p.distance}, {"bound", p.bound}});
  j = Json{{"status", to_string(r.status)},
           {"abscissa", r.abscissa},
           {"rate", r.rate},
           {"constant", r.constant ? opt_number(*r.constant) : Json(nullptr)},
           {"initial_distance", r.initial_distance},
           {"curve", curve},
           {"distance_model", r.distance_model}};
}

void from_json(const Json& j, DecayReport& r) {
  r.status = decay_status_from_string(field(j, "status").get<std::string>());
  r.abscissa = in_field(j, "abscissa", number);
  r.rate = in_field(j, "rate", number);
  const Json& c = field(j, "constant");
  r.constant = c.is_null() ? std::nullopt : std::optional<double>(c.get<double>());
  r.initial_distance = in_field(j, "initial_distance", number);
  r.curve.clear();
  for (const auto& p : field(j, "curve")) {
    r.curve.push_back({in_field(p, "t", number), in_field(p, "distance", number), in_field(p, "bound", number)});
  }
  r.distance_model = field(j, "distance_model").get<std::string>();
}

void to_json(Json& j, const TransversalityReport& r) {
  j = Json{{"crossings", r.crossings}, {"transversal", r.transversal}, {"grid_points", r.grid_points}};
}

void to_json(Json& j, const AffineAudit& a) {
  j = Json{{"hypothesis", a.hypothesis},
           {"transversality_X1", a.transversality_1},
           {"transversality_X2", a.transversality_2},
           {"distance_model", a.distance_model}};
}

// --- algebra specs ----------------------------------------------------------------------------

Json algebra_to_json(const LieAlgebraSpec& spec) {
  Json structure = Json::array();
  for (const auto& br : spec.brackets()) structure.push_back(Json{{"i", br.i}, {"j", br.j}, {"coeffs", br.coeffs}});
  Json j{{"dim", spec.dim()}, {"basis", spec.basis()}, {"structure", structure}};
  if (spec.has_realization()) {
    Json real = Json::array();
    for (const auto& m : spec.realization()) real.push_back(matrix_to_json(m));
    j["realization"] = real;
  }
  return j;
}

LieAlgebraSpec algebra_from_json(const Json& j, const std::string& name) {
  const auto dim = in_field(j, "dim", [](const Json& x) {
    if (!x.is_number_unsigned() || x.get<std::size_t>() == 0) {
      throw Error(ErrorKind::InvalidArgument, "dim must be a positive integer");
    }
    return x.get<std::size_t>();
  });
  std::vector<std::string> basis;
  if (j.contains("basis")) {
    basis = in_field(j, "basis", [](const Json& x) { return x.get<std::vector<std::string>>(); });
    if (basis.size() != dim) throw Error(ErrorKind::DimensionMismatch, "field 'basis': expected dim labels");
  } else {
    for (std::size_t i = 0; i < dim; ++i) basis.push_back("e" + std::to_string(i + 1));
  }
  std::vector<LieAlgebraSpec::Bracket> brackets;
  if (j.contains("structure")) {
    for (const auto& entry : field(j, "structure")) {
      brackets.push_back({in_field(entry, "i", [](const Json& x) { return x.get<std::size_t>(); }),
                          in_field(entry, "j", [](const Json& x) { return x.get<std::size_t>(); }),
                          in_field(entry, "coeffs", vector_from_json)});
    }
  }
  std::optional<std::vector<Matrix>> realization;
  if (j.contains("realization") && !j["realization"].is_null()) {
    realization = in_field(j, "realization", [](const Json& x) {
      std::vector<Matrix> ms;
      for (const auto& m : x) ms.push_back(matrix_from_json(m));
      return ms;
    });
  }
  try {
    return LieAlgebraSpec(name, std::move(basis), brackets, std::move(realization));
  } catch (const Error& e) {
    const std::string what = e.what();
    const char* where = what.find("realization") != std::string::npos ? "realization" : "structure";
    throw Error(e.kind(), std::string("field '") + where + "': " + what);
  }
}

}  // namespace hypflow
