#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypflow/config.hpp"
#include "hypflow/json_io.hpp"

namespace hypflow::cli {

enum class Command {
  Certify,
  ConjugacyBuild,
  ConjugacyVerify,
  Gl2Classify,
  AlgebraAudit,
  AdjointDecay,
  AffineSimulate,
  AffineAudit,
};

enum class OutputFormat { Json, Csv, Text };

const char* to_string(Command c);
Command parse_command(const std::string& s);
const char* to_string(OutputFormat f);
/// Throws UnsupportedFormat.
OutputFormat parse_format(const std::string& s);
std::vector<std::string> command_names();

struct RunConfig {
  Command command = Command::Certify;
  std::string input_path;
  std::uint64_t seed = 42;
  std::size_t samples = 100;
  double t_min = -3.0;
  double t_max = 3.0;
  std::size_t t_steps = 25;
  OutputFormat format = OutputFormat::Json;
  std::optional<std::string> out_path;
  unsigned threads = 0;
  Tolerances tolerances;
  double conjugacy_tolerance = 1e-6;  // pass threshold for residual reports

  void validate() const;
};

/// Everything a command produced; emit_report renders it.
struct Report {
  Command command = Command::Certify;
  bool passed = false;
  std::string verdict;
  Json header;  // config echo, seed
  Json body;
  std::vector<std::string> csv_header;
  std::vector<std::vector<Json>> csv_rows;
  std::vector<std::string> text;
};

std::string emit_report(const Report& report, OutputFormat format);

struct RunResult {
  int exit_code = 0;
  std::string output;      // rendered report (empty on input errors)
  std::string diagnostic;  // message for stderr
};

/// Exit 0: pass / conjugate / hypothesis holds. Exit 1: completed with a
/// negative verdict. Exit 2: input or parse error.
RunResult run(const RunConfig& config);

/// Builds the report without rendering; input problems throw InputError.
Report build_report(const RunConfig& config);

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CLI11 front end shared by the executable and the tests.
int main_entry(int argc, const char* const* argv);

}  // namespace hypflow::cli
