#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hypflow/affine.hpp"
#include "hypflow/conjugacy.hpp"
#include "hypflow/error.hpp"
#include "hypflow/lie_algebra.hpp"
#include "hypflow/lifted_flow.hpp"
#include "hypflow/random.hpp"

namespace hypflow::cli {

namespace {

struct CommandName {
  Command command;
  const char* name;
};

constexpr CommandName kCommands[] = {
    {Command::Certify, "certify"},
    {Command::ConjugacyBuild, "conjugacy-build"},
    {Command::ConjugacyVerify, "conjugacy-verify"},
    {Command::Gl2Classify, "gl2-classify"},
    {Command::AlgebraAudit, "algebra-audit"},
    {Command::AdjointDecay, "adjoint-decay"},
    {Command::AffineSimulate, "affine-simulate"},
    {Command::AffineAudit, "affine-audit"},
};

constexpr double kDecaySlack = 1e-8;

}  // namespace

const char* to_string(Command c) {
  for (const auto& entry : kCommands) {
    if (entry.command == c) return entry.name;
  }
  return "unknown";
}

Command parse_command(const std::string& s) {
  for (const auto& entry : kCommands) {
    if (s == entry.name) return entry.command;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown command '" + s + "'");
}

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& entry : kCommands) out.emplace_back(entry.name);
  return out;
}

const char* to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Text: return "text";
  }
  return "json";
}

OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "text") return OutputFormat::Text;
  throw Error(ErrorKind::UnsupportedFormat, "format '" + s + "' (expected json, csv or text)");
}

void RunConfig::validate() const {
  if (!(t_min < t_max)) throw InputError("--t-min must be smaller than --t-max");
  if (t_steps < 2) throw InputError("--t-steps must be at least 2");
  if (samples < 1) throw InputError("--samples must be at least 1");
  if (input_path.empty()) throw InputError("--input is required");
}

// --- rendering --------------------------------------------------------------------

namespace {

std::string format_cell(const Json& cell) {
  if (cell.is_number_float()) {
    const double x = cell.get<double>();
    if (!std::isfinite(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_null()) return "";
  return cell.dump();
}

std::string fmt(double x) { return format_cell(Json(x)); }

}  // namespace

std::string emit_report(const Report& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::Json: {
      Json doc = report.header;
      doc["command"] = to_string(report.command);
      doc["verdict"] = report.verdict;
      doc["passed"] = report.passed;
      doc["report"] = report.body;
      return dump_canonical(doc);
    }
    case OutputFormat::Csv: {
      std::string out;
      for (std::size_t i = 0; i < report.csv_header.size(); ++i) {
        if (i) out += ',';
        out += report.csv_header[i];
      }
      out += '\n';
      for (const auto& row : report.csv_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) out += ',';
          out += format_cell(row[i]);
        }
        out += '\n';
      }
      return out;
    }
    case OutputFormat::Text: {
      std::string out = std::string("command: ") + to_string(report.command) + "\n";
      out += "seed: " + format_cell(report.header.value("seed", Json(0))) + "\n";
      out += "verdict: " + report.verdict + (report.passed ? " (pass)" : " (fail)") + "\n";
      for (const auto& line : report.text) out += line + "\n";
      return out;
    }
  }
  throw Error(ErrorKind::UnsupportedFormat, "unknown output format");
}

// --- input handling --------------------------------------------------------------------

namespace {

struct Input {
  std::string path;
  std::string text;
  Json json;
  std::optional<std::string> builtin;
};

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

Input load_input(const std::string& path) {
  Input in;
  in.path = path;
  const std::string prefix = "builtin:";
  if (path.rfind(prefix, 0) == 0) {
    const std::string name = path.substr(prefix.size());
    const auto names = builtin_algebra_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw InputError("unknown built-in algebra '" + name + "'");
    }
    in.builtin = name;
    return in;
  }
  std::ifstream file(path);
  if (!file) throw InputError(path + ": cannot open input file");
  std::stringstream ss;
  ss << file.rdbuf();
  in.text = ss.str();
  try {
    in.json = Json::parse(in.text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ":" + std::to_string(line_of_offset(in.text, e.byte > 0 ? e.byte - 1 : 0)) +
                     ": JSON parse error: " + e.what());
  }
  return in;
}

// Converts a schema error into a diagnostic naming the field and its line.
[[noreturn]] void schema_error(const Input& in, const std::string& message) {
  std::string where = in.path;
  const std::string marker = "field '";
  const auto pos = message.find(marker);
  if (pos != std::string::npos && !in.text.empty()) {
    const auto end = message.find('\'', pos + marker.size());
    const std::string name = message.substr(pos + marker.size(), end - pos - marker.size());
    const auto at = in.text.find("\"" + name + "\"");
    if (at != std::string::npos) where += ":" + std::to_string(line_of_offset(in.text, at));
  }
  throw InputError(where + ": " + message);
}

template <typename Fn>
auto parse_input(const Input& in, Fn fn) {
  try {
    return fn();
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    schema_error(in, e.what());
  } catch (const nlohmann::json::exception& e) {
    schema_error(in, e.what());
  }
}

const Json& require(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(ErrorKind::InvalidArgument, std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

Matrix matrix_field(const Json& j, const char* name) {
  try {
    return matrix_from_json(require(j, name));
  } catch (const Error& e) {
    if (std::string(e.what()).find("field '") != std::string::npos) throw;
    throw Error(e.kind(), std::string("field '") + name + "': " + e.what());
  }
}

Vector vector_field(const Json& j, const char* name) {
  try {
    return vector_from_json(require(j, name));
  } catch (const Error& e) {
    if (std::string(e.what()).find("field '") != std::string::npos) throw;
    throw Error(e.kind(), std::string("field '") + name + "': " + e.what());
  }
}

struct MatrixPair {
  Matrix a;
  Matrix b;
};

MatrixPair parse_pair(const Input& in) {
  return parse_input(in, [&] {
    MatrixPair p{matrix_field(in.json, "A"), matrix_field(in.json, "B")};
    require_square(p.a, "field 'A'");
    require_same_shape(p.a, p.b, "field 'B'");
    return p;
  });
}

// Algebra from builtin:NAME, {"algebra": "sl2" | {...}}, or a bare spec object.
LieAlgebraSpec parse_algebra(const Input& in) {
  if (in.builtin) return builtin_algebra(*in.builtin);
  return parse_input(in, [&] {
    const Json* spec = &in.json;
    if (in.json.is_object() && in.json.contains("algebra")) {
      const Json& alg = in.json.at("algebra");
      if (alg.is_string()) {
        std::string name = alg.get<std::string>();
        if (name.rfind("builtin:", 0) == 0) name = name.substr(8);
        try {
          return builtin_algebra(name);
        } catch (const Error& e) {
          throw Error(e.kind(), std::string("field 'algebra': ") + e.what());
        }
      }
      spec = &alg;
    }
    try {
      return algebra_from_json(*spec, "custom");
    } catch (const Error& e) {
      if (std::string(e.what()).find("field '") != std::string::npos) throw;
      throw Error(e.kind(), std::string("field 'structure': ") + e.what());
    }
  });
}

AlgebraElement element_or_random(const Input& in, const char* name, const LieAlgebraSpec& spec, Rng& rng) {
  // always consume the draw so the stream does not depend on which fields are present
  AlgebraElement random{rng.uniform_vector(spec.dim(), -1.0, 1.0)};
  if (in.builtin || !in.json.is_object() || !in.json.contains(name)) return random;
  return parse_input(in, [&] {
    AlgebraElement x{vector_field(in.json, name)};
    if (x.coords.size() != spec.dim()) {
      throw Error(ErrorKind::DimensionMismatch, std::string("field '") + name + "': expected " +
                                                    std::to_string(spec.dim()) + " coordinates");
    }
    return x;
  });
}

// --- reports ---------------------------------------------------------------------------

Json header_for(const RunConfig& c) {
  return Json{{"seed", c.seed},
              {"samples", c.samples},
              {"input", c.input_path},
              {"t_grid", Json{{"t_min", c.t_min}, {"t_max", c.t_max}, {"t_steps", c.t_steps}}}};
}

TimeGrid grid_for(const RunConfig& c) { return TimeGrid{c.t_min, c.t_max, c.t_steps}; }

VerifyOptions verify_options(const RunConfig& c) {
  VerifyOptions o;
  o.samples = c.samples;
  o.grid = grid_for(c);
  o.seed = c.seed;
  o.threads = c.threads;
  return o;
}

std::string complex_text(std::complex<double> mu) {
  return fmt(mu.real()) + (mu.imag() < 0 ? " - " : " + ") + fmt(std::abs(mu.imag())) + "i";
}

void spectrum_rows(Report& r, const std::string& label, const Spectrum& s) {
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    r.csv_rows.push_back({label, i, s.eigenvalues[i].real(), s.eigenvalues[i].imag()});
  }
}

Report certify_report(const RunConfig& c, const Input& in) {
  const Matrix a = parse_input(in, [&] {
    Matrix m = in.json.is_array() ? matrix_from_json(in.json) : matrix_field(in.json, "A");
    require_square(m, "field 'A'");
    return m;
  });
  Report r;
  r.body["spectrum"] = spectrum(a, c.tolerances);
  r.csv_header = {"matrix", "index", "re", "im"};
  spectrum_rows(r, "A", r.body["spectrum"].get<Spectrum>());
  r.text.push_back("clause: e^{At} is hyperbolic (||e^{At}v||_* <= e^{-at}||v||_*, a > 0) iff every eigenvalue of A has negative real part");
  try {
    const HyperbolicityCertificate cert = certify(a, AlgebraSlot::Vector, c.tolerances);
    r.body["certificate"] = cert;
    r.body["witness"] = nullptr;
    // sampled check of the contraction estimate on the t >= 0 part of the grid
    Rng rng(c.seed);
    std::vector<double> ts;
    for (double t : grid_for(c).points()) {
      if (t >= 0.0) ts.push_back(t);
    }
    if (ts.empty()) ts.push_back(0.0);
    double worst = 0.0;
    std::size_t violations = 0;
    for (std::size_t s = 0; s < c.samples; ++s) {
      const Vector v = rng.normal_vector(a.n());
      const double v0 = p_norm(cert.form, v);
      for (double t : ts) {
        const double ratio = p_norm(cert.form, mat_exp(a, t) * v) / (std::exp(-cert.form.rate * t) * v0);
        worst = std::max(worst, ratio);
        if (ratio > 1.0 + kDecaySlack) ++violations;
      }
    }
    r.body["decay_check"] = Json{{"max_ratio", worst}, {"violations", violations}, {"samples", c.samples},
                                 {"times", ts.size()}};
    r.passed = violations == 0;
    r.verdict = "hyperbolic";
    r.text.push_back("abscissa: " + fmt(cert.abscissa));
    r.text.push_back("rate a = 1/(2 lambda_max(P)): " + fmt(cert.form.rate));
    r.text.push_back("sampled decay ratio max: " + fmt(worst) + ", violations: " + std::to_string(violations));
  } catch (const NotHyperbolicError& e) {
    r.body["certificate"] = nullptr;
    r.body["witness"] = Json{{"re", e.witness().real()}, {"im", e.witness().imag()}};
    r.passed = false;
    r.verdict = "not-hyperbolic";
    r.text.push_back("witness eigenvalue: " + complex_text(e.witness()) + " (real part >= 0)");
  }
  return r;
}

std::optional<ConjugacyData> certified_pair(const PairClassification& cls, const Matrix& a, const Matrix& b) {
  switch (cls.verdict) {
    case PairVerdict::ConjugateStable: return ConjugacyData(certify(a), certify(b));
    case PairVerdict::ConjugateUnstable:
      return ConjugacyData(certify(negate_generator(a)), certify(negate_generator(b)));
    case PairVerdict::Inconclusive: return std::nullopt;
  }
  return std::nullopt;
}

const char* pair_clause() {
  return "clause: every eigenvalue of A and of B with negative real part => e^{At}, e^{Bt} topologically "
         "conjugate; every real part positive => conjugate through -A, -B";
}

Report conjugacy_build_report(const RunConfig& c, const Input& in) {
  const MatrixPair p = parse_pair(in);
  std::vector<LiftedPoint> points;
  if (in.json.contains("points")) {
    points = parse_input(in, [&] {
      std::vector<LiftedPoint> pts;
      for (const auto& x : require(in.json, "points")) {
        LiftedPoint pt = x.get<LiftedPoint>();
        require_same_shape(pt.g, p.a, "field 'g'");
        pts.push_back(std::move(pt));
      }
      return pts;
    });
  }
  Report r;
  const PairClassification cls = classify_pair(p.a, p.b);
  r.body["classification"] = cls;
  r.text.push_back(pair_clause());
  r.csv_header = {"point_id", "round_trip_residual"};
  const auto cd = certified_pair(cls, p.a, p.b);
  if (!cd) {
    r.verdict = "inconclusive";
    r.body["points"] = Json::array();
    r.text.push_back("no conjugacy constructed: hypotheses fail");
    return r;
  }
  if (points.empty()) {
    Rng rng(c.seed);
    points = sample_points(*cd, verify_options(c), rng);
  }
  Json out = Json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const LiftedPoint image = psi_forward(*cd, points[i]);
    const LiftedPoint back = psi_inverse(*cd, image);
    const double rt = lifted_distance(back, points[i], cd->cert_a().form);
    worst = std::max(worst, rt);
    out.push_back(Json{{"input", points[i]}, {"image", image}, {"round_trip_residual", rt}});
    r.csv_rows.push_back({i, rt});
  }
  r.body["certificate_A"] = cd->cert_a();
  r.body["certificate_B"] = cd->cert_b();
  r.body["points"] = out;
  r.body["max_round_trip_residual"] = worst;
  r.passed = worst <= c.conjugacy_tolerance;
  r.verdict = r.passed ? "conjugate" : "fail";
  r.text.push_back("verdict of classifier: " + std::string(to_string(cls.verdict)));
  r.text.push_back("max round-trip residual: " + fmt(worst));
  return r;
}

Report conjugacy_verify_report(const RunConfig& c, const Input& in) {
  const MatrixPair p = parse_pair(in);
  Report r;
  r.text.push_back(pair_clause());
  r.csv_header = {"sample_id", "t", "residual"};
  const PairClassification cls = classify_pair(p.a, p.b);
  r.body["classification"] = cls;
  const auto cd = certified_pair(cls, p.a, p.b);
  if (!cd) {
    r.verdict = "inconclusive";
    r.body["residual"] = nullptr;
    r.text.push_back("classifier verdict: Inconclusive");
    return r;
  }
  std::vector<ResidualSample> trace;
  const ResidualReport rep = verify_conjugacy(*cd, verify_options(c), &trace);
  for (const auto& s : trace) r.csv_rows.push_back({s.sample_id, s.t, s.residual});
  r.body["residual"] = rep;
  r.passed = rep.max_residual <= c.conjugacy_tolerance;
  r.verdict = r.passed ? "conjugate" : "fail";
  r.text.push_back("classifier verdict: " + std::string(to_string(cls.verdict)));
  r.text.push_back("conjugacy identity psi(Phi_A(t,x)) = Phi_B(t,psi(x)) max residual: " + fmt(rep.max_residual) +
                   " over " + std::to_string(rep.samples) + " samples x " + std::to_string(rep.grid_points) + " times");
  return r;
}

Report gl2_report(const RunConfig&, const Input& in) {
  const MatrixPair p = parse_pair(in);
  if (p.a.n() != 2) schema_error(in, "field 'A': gl2-classify needs 2x2 matrices");
  Report r;
  const PairClassification cls = classify_gl2_pair(p.a, p.b);
  r.body["classification"] = cls;
  r.verdict = to_string(cls.verdict);
  r.passed = cls.verdict != PairVerdict::Inconclusive;
  r.csv_header = {"matrix", "index", "re", "im"};
  spectrum_rows(r, "A", cls.spectrum_a);
  spectrum_rows(r, "B", cls.spectrum_b);
  r.text.push_back(pair_clause());
  r.text.push_back("discriminants (a-d)^2+4bc: A " + fmt(cls.discriminant_a) + ", B " + fmt(cls.discriminant_b));
  if (cls.trace_rule_applies) {
    r.text.push_back("both discriminants <= 0: real parts are tr/2; trace rule fired: " + cls.trace_rule);
  } else {
    r.text.push_back("trace rule not applicable; decision from computed spectra");
  }
  return r;
}

void witness_text(Report& r, const TransferAudit& audit) {
  for (const auto& w : audit.witnesses) {
    const std::string self = "ad(" + w.element + ")" + w.element;
    r.text.push_back("witness " + w.element + ": " + self + " = 0 (|" + self + "| = " + fmt(w.self_bracket_residual) +
                     "), leading eigenvalue " + complex_text(w.leading));
    if (w.trace_ad) r.text.push_back("  trace ad(" + w.element + ") = " + fmt(*w.trace_ad));
  }
}

const char* transfer_clause() {
  return "clause: semisimple algebra and every eigenvalue of ad(A), ad(B) with negative real part => "
         "e^{At}, e^{Bt} conjugate via Ad^{-1} o psi o Ad";
}

Report algebra_audit_report(const RunConfig& c, const Input& in) {
  const LieAlgebraSpec spec = parse_algebra(in);
  Rng rng(c.seed);
  const AlgebraElement a = element_or_random(in, "A", spec, rng);
  const AlgebraElement b = element_or_random(in, "B", spec, rng);
  Report r;
  r.body["algebra"] = algebra_to_json(spec);
  r.body["algebra_name"] = spec.name();
  r.body["jacobi_residual"] = spec.jacobi_residual();
  r.body["killing_gram"] = matrix_to_json(killing_gram(spec));
  r.body["elements"] = Json{{"A", a.coords}, {"B", b.coords}};
  const TransferAudit audit = semisimple_transfer_audit(spec, a, b, verify_options(c));
  r.body["audit"] = audit;
  if (spec.has_realization()) {
    const TimeGrid grid = grid_for(c);
    const GridResidual inter = intertwining_check(spec, a, grid, c.tolerances);
    const GridResidual ode = adjoint_ode_check(spec, a, Matrix::identity(spec.realization_n()), grid, c.tolerances);
    r.body["identities"] = Json{{"intertwining_max_residual", inter.max_residual},
                                {"adjoint_ode_max_residual", ode.max_residual}};
    r.text.push_back("Ad(e^{tA}) = e^{t ad A} max residual: " + fmt(inter.max_residual));
    r.text.push_back("d/dt Ad(g(t)) = ad(A) Ad(g(t)) max residual: " + fmt(ode.max_residual));
  } else {
    r.body["identities"] = nullptr;
  }
  r.passed = audit.hypothesis_holds && audit.conjugacy && audit.conjugacy->max_residual <= c.conjugacy_tolerance;
  r.verdict = audit.hypothesis_holds ? (r.passed ? "hypothesis-holds" : "fail") : "hypothesis-fails";
  r.csv_header = {"element", "index", "re", "im"};
  spectrum_rows(r, "adA", audit.spectrum_a);
  spectrum_rows(r, "adB", audit.spectrum_b);
  r.text.insert(r.text.begin(), transfer_clause());
  r.text.push_back("algebra: " + spec.name() + (audit.semisimplicity.semisimple ? " (semisimple)" : " (not semisimple)"));
  r.text.push_back("abscissa ad(A): " + fmt(audit.spectrum_a.abscissa) + ", ad(B): " + fmt(audit.spectrum_b.abscissa));
  witness_text(r, audit);
  return r;
}

Report adjoint_decay_report(const RunConfig& c, const Input& in) {
  const LieAlgebraSpec spec = parse_algebra(in);
  if (!spec.has_realization()) schema_error(in, "field 'realization': adjoint-decay needs a matrix realization");
  Rng rng(c.seed);
  const AlgebraElement a = element_or_random(in, "A", spec, rng);
  const AlgebraElement x0{rng.uniform_vector(spec.dim(), -0.5, 0.5)};
  Matrix g0 = mat_exp(realize(spec, x0), 1.0);
  if (!in.builtin && in.json.is_object() && in.json.contains("g0")) {
    g0 = parse_input(in, [&] {
      Matrix g = matrix_field(in.json, "g0");
      require_same_shape(g, spec.realization().front(), "field 'g0'");
      return g;
    });
  }
  const DecayReport rep = adjoint_decay_check(spec, a, g0, grid_for(c), c.tolerances);
  Report r;
  r.body["algebra_name"] = spec.name();
  r.body["A"] = a.coords;
  r.body["g0"] = matrix_to_json(g0);
  r.body["decay"] = rep;
  r.passed = rep.status != DecayStatus::Unsatisfiable;
  r.verdict = to_string(rep.status);
  r.csv_header = {"t", "distance", "bound"};
  for (const auto& p : rep.curve) r.csv_rows.push_back({p.t, p.distance, p.bound});
  r.text.push_back("clause: ad(A) with negative real parts => rho(e^{At}g0, e) <= c e^{-at} rho(g0, e); "
                   "distance proxy |Ad(g) - Id|_F");
  r.text.push_back("abscissa ad(A): " + fmt(rep.abscissa));
  if (rep.constant) r.text.push_back("smallest constant on grid: " + fmt(*rep.constant));
  return r;
}

Report affine_simulate_report(const RunConfig& c, const Input& in) {
  struct Setup {
    AffineGenerator x;
    AffineElement g;
  };
  const Setup s = parse_input(in, [&] {
    Setup out{in.json.get<AffineGenerator>(), AffineElement{}};
    require_square(out.x.a, "field 'A'");
    if (out.x.b.size() != out.x.a.n()) throw Error(ErrorKind::DimensionMismatch, "field 'b': wrong size");
    if (in.json.contains("g")) {
      try {
        out.g = in.json.at("g").get<AffineElement>();
      } catch (const Error& e) {
        throw Error(e.kind(), std::string("field 'g': ") + e.what());
      }
      require_same_shape(out.g.h, out.x.a, "field 'g'");
      if (out.g.w.size() != out.x.a.n()) throw Error(ErrorKind::DimensionMismatch, "field 'w': wrong size");
    } else {
      out.g = AffineElement::identity(out.x.a.n());
    }
    return out;
  });
  Report r;
  const std::size_t n = s.x.a.n();
  r.csv_header = {"t"};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.csv_header.push_back("h" + std::to_string(i) + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) r.csv_header.push_back("w" + std::to_string(i));
  Json traj = Json::array();
  double worst = 0.0;
  for (double t : grid_for(c).points()) {
    const AffineElement y = affine_flow(s.x, t, s.g);
    const Matrix via_h = linear_part_flow(s.x.a, t, project(s.g));
    worst = std::max(worst, (project(y) - via_h).frobenius_norm() / std::max(1.0, via_h.frobenius_norm()));
    traj.push_back(Json{{"t", t}, {"h", matrix_to_json(y.h)}, {"w", y.w}});
    std::vector<Json> row{t};
    for (double v : y.h.flat()) row.emplace_back(v);
    for (double v : y.w) row.emplace_back(v);
    r.csv_rows.push_back(std::move(row));
  }
  r.body["generator"] = s.x;
  r.body["initial"] = s.g;
  r.body["trajectory"] = traj;
  r.body["semiconjugacy_max_residual"] = worst;
  r.passed = worst <= 1e-10;
  r.verdict = r.passed ? "pass" : "fail";
  r.text.push_back("clause: Phi(t,g) = exp(tX) g; projection satisfies pi(Phi(t,g)) = exp(tA) pi(g)");
  r.text.push_back("semiconjugacy max residual: " + fmt(worst));
  return r;
}

Report affine_audit_report(const RunConfig& c, const Input& in) {
  const LieAlgebraSpec spec = parse_algebra(in);
  if (!spec.has_realization()) schema_error(in, "field 'realization': affine-audit needs a matrix realization");
  const std::size_t n = spec.realization_n();
  Rng rng(c.seed);
  auto generator = [&](const char* name) {
    AffineAlgebraGenerator g{AlgebraElement{rng.uniform_vector(spec.dim(), -1.0, 1.0)}, rng.uniform_vector(n, -1.0, 1.0)};
    if (in.builtin || !in.json.is_object() || !in.json.contains(name)) return g;
    return parse_input(in, [&] {
      const Json& x = require(in.json, name);
      try {
        AffineAlgebraGenerator out{AlgebraElement{vector_field(x, "A")}, vector_field(x, "b")};
        if (out.a.coords.size() != spec.dim()) throw Error(ErrorKind::DimensionMismatch, "field 'A': wrong size");
        if (out.b.size() != n) throw Error(ErrorKind::DimensionMismatch, "field 'b': wrong size");
        return out;
      } catch (const Error& e) {
        throw Error(e.kind(), std::string("field '") + name + "': " + e.what());
      }
    });
  };
  const AffineAlgebraGenerator x1 = generator("X1");
  const AffineAlgebraGenerator x2 = generator("X2");
  AffineAuditOptions opts;
  opts.seed = c.seed;
  opts.samples = c.samples;
  opts.grid = TimeGrid{c.t_min, c.t_max, std::max<std::size_t>(c.t_steps, 401)};
  opts.verify = verify_options(c);
  const AffineAudit audit = affine_hypothesis_audit(spec, x1, x2, opts);
  Report r;
  r.body["algebra_name"] = spec.name();
  r.body["X1"] = Json{{"A", x1.a.coords}, {"b", x1.b}};
  r.body["X2"] = Json{{"A", x2.a.coords}, {"b", x2.b}};
  r.body["audit"] = audit;
  r.passed = audit.hypothesis.hypothesis_holds;
  r.verdict = r.passed ? "hypothesis-holds" : "hypothesis-fails";
  r.csv_header = {"generator", "sample_id", "crossings"};
  for (std::size_t i = 0; i < audit.transversality_1.crossings.size(); ++i)
    r.csv_rows.push_back({"X1", i, audit.transversality_1.crossings[i]});
  for (std::size_t i = 0; i < audit.transversality_2.crossings.size(); ++i)
    r.csv_rows.push_back({"X2", i, audit.transversality_2.crossings[i]});
  r.text.push_back("clause: H semisimple and every eigenvalue of ad(A1), ad(A2) with negative real part => "
                   "Phi_1, Phi_2 conjugate (unit spheres are transversal sections)");
  witness_text(r, audit.hypothesis);
  r.text.push_back(std::string("transversality X1: ") + (audit.transversality_1.transversal ? "every orbit crosses once" : "not transversal"));
  r.text.push_back(std::string("transversality X2: ") + (audit.transversality_2.transversal ? "every orbit crosses once" : "not transversal"));
  return r;
}

}  // namespace

Report build_report(const RunConfig& config) {
  config.validate();
  const Input in = load_input(config.input_path);
  const bool algebra_command = config.command == Command::AlgebraAudit || config.command == Command::AdjointDecay ||
                               config.command == Command::AffineAudit;
  if (in.builtin && !algebra_command) {
    throw InputError(std::string(to_string(config.command)) + " does not accept built-in algebra inputs");
  }
  Report r;
  switch (config.command) {
    case Command::Certify: r = certify_report(config, in); break;
    case Command::ConjugacyBuild: r = conjugacy_build_report(config, in); break;
    case Command::ConjugacyVerify: r = conjugacy_verify_report(config, in); break;
    case Command::Gl2Classify: r = gl2_report(config, in); break;
    case Command::AlgebraAudit: r = algebra_audit_report(config, in); break;
    case Command::AdjointDecay: r = adjoint_decay_report(config, in); break;
    case Command::AffineSimulate: r = affine_simulate_report(config, in); break;
    case Command::AffineAudit: r = affine_audit_report(config, in); break;
  }
  r.command = config.command;
  r.header = header_for(config);
  return r;
}

RunResult run(const RunConfig& config) {
  RunResult result;
  try {
    const Report report = build_report(config);
    result.output = emit_report(report, config.format);
    result.exit_code = report.passed ? 0 : 1;
  } catch (const InputError& e) {
    result.exit_code = 2;
    result.diagnostic = std::string("input error: ") + e.what();
  } catch (const Error& e) {
    result.exit_code = 2;
    result.diagnostic = std::string("error: ") + e.what();
  }
  return result;
}

int main_entry(int argc, const char* const* argv) {
  CLI::App app{"Construct and verify topological conjugacies of hyperbolic flows on matrix Lie groups"};
  RunConfig config;
  std::string command;
  std::string format = "json";
  std::string out_path;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(command_names()));
  app.add_option("--input", config.input_path, "Input JSON file or builtin:NAME")->required();
  app.add_option("--seed", config.seed, "Seed of the single random generator")->capture_default_str();
  app.add_option("--samples", config.samples, "Number of random samples")->capture_default_str();
  app.add_option("--t-min", config.t_min, "Time grid start")->capture_default_str();
  app.add_option("--t-max", config.t_max, "Time grid end")->capture_default_str();
  app.add_option("--t-steps", config.t_steps, "Time grid points")->capture_default_str();
  app.add_option("--format", format, "json, csv or text")->capture_default_str();
  app.add_option("--out", out_path, "Output file (default stdout)");
  app.add_option("--threads", config.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--conjugacy-tol", config.conjugacy_tolerance, "Pass threshold for conjugacy residuals")
      ->capture_default_str();
  app.add_option("--crossing-tol", config.tolerances.crossing_residual, "Unit-sphere crossing residual")
      ->capture_default_str();
  app.add_option("--lyapunov-tol", config.tolerances.lyapunov_residual, "Relative Lyapunov residual")
      ->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    config.command = parse_command(command);
    config.format = parse_format(format);
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  if (!out_path.empty()) config.out_path = out_path;

  const RunResult result = run(config);
  if (!result.diagnostic.empty()) std::cerr << result.diagnostic << "\n";
  if (result.exit_code != 2) {
    if (config.out_path) {
      std::ofstream file(*config.out_path, std::ios::binary);
      if (!file) {
        std::cerr << "error: cannot write " << *config.out_path << "\n";
        return 2;
      }
      file << result.output;
    } else {
      std::cout << result.output;
    }
  }
  return result.exit_code;
}

}  // namespace hypflow::cli
