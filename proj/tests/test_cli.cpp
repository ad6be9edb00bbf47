#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "cli.hpp"
#include "hypflow/error.hpp"

using namespace hypflow;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hypflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }

  static cli::RunConfig config(cli::Command c, const std::string& input) {
    cli::RunConfig cfg;
    cfg.command = c;
    cfg.input_path = input;
    return cfg;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CertifyStable) {
  const auto r = cli::run(config(cli::Command::Certify, write("a.json", R"({"A": [[-1, 0], [0, -2]]})")));
  ASSERT_EQ(r.exit_code, 0) << r.diagnostic;
  const Json j = Json::parse(r.output);
  EXPECT_EQ(j["report"]["certificate"]["abscissa"].get<double>(), -1.0);
  EXPECT_NEAR(j["report"]["certificate"]["rate"].get<double>(), 1.0, 1e-14);
  EXPECT_NEAR(j["report"]["certificate"]["P"][1][1].get<double>(), 0.25, 1e-15);
  EXPECT_EQ(j["command"], "certify");
  EXPECT_EQ(j["seed"], 42);
}

TEST_F(CliTest, CertifyRotationFails) {
  const auto r = cli::run(config(cli::Command::Certify, write("a.json", "[[0, 1], [-1, 0]]")));
  ASSERT_EQ(r.exit_code, 1) << r.diagnostic;
  const Json j = Json::parse(r.output);
  EXPECT_NEAR(j["report"]["witness"]["re"].get<double>(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(j["report"]["witness"]["im"].get<double>()), 1.0, 1e-15);
}

TEST_F(CliTest, Gl2Stable) {
  const auto r = cli::run(
      config(cli::Command::Gl2Classify, write("p.json", R"({"A": [[-1, 1], [-1, -1]], "B": [[-2, 2], [-2, -2]]})")));
  ASSERT_EQ(r.exit_code, 0) << r.diagnostic;
  EXPECT_EQ(Json::parse(r.output)["verdict"], "ConjugateStable");
}

TEST_F(CliTest, ConjugacyVerifyCsvHeader) {
  auto cfg = config(cli::Command::ConjugacyVerify, write("p.json", R"({"A": [[-1, 0], [0, -2]], "B": [[-1, 1], [-1, -1]]})"));
  cfg.format = cli::OutputFormat::Csv;
  cfg.samples = 4;
  const auto r = cli::run(cfg);
  ASSERT_EQ(r.exit_code, 0) << r.diagnostic;
  EXPECT_EQ(r.output.substr(0, r.output.find('\n')), "sample_id,t,residual");
  EXPECT_EQ(std::count(r.output.begin(), r.output.end(), '\n'), 1 + 4 * 25);
}

TEST_F(CliTest, InconclusivePairExitsOne) {
  const auto r = cli::run(config(cli::Command::ConjugacyVerify, write("p.json", R"({"A": [[1, 0], [0, -1]], "B": [[-1, 0], [0, -1]]})")));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(Json::parse(r.output)["verdict"], "inconclusive");
}

TEST_F(CliTest, AuditTextCarriesWitness) {
  auto cfg = config(cli::Command::AlgebraAudit, "builtin:sl2");
  cfg.format = cli::OutputFormat::Text;
  const auto r = cli::run(cfg);
  EXPECT_EQ(r.exit_code, 1) << r.diagnostic;
  EXPECT_NE(r.output.find("ad(A)A = 0"), std::string::npos);
  EXPECT_NE(r.output.find("clause:"), std::string::npos);
}

TEST_F(CliTest, AuditFromSpecFile) {
  const auto r = cli::run(config(cli::Command::AlgebraAudit,
                                 write("h.json", R"({"algebra": "heisenberg3", "A": [1, 0, 0], "B": [0, 1, 0]})")));
  EXPECT_EQ(r.exit_code, 1) << r.diagnostic;
  const Json j = Json::parse(r.output);
  EXPECT_EQ(j["report"]["audit"]["hypothesis_holds"], false);
  EXPECT_EQ(j["report"]["elements"]["A"], Json::parse("[1.0, 0.0, 0.0]"));
}

TEST_F(CliTest, AdjointDecayAndAffine) {
  auto decay = config(cli::Command::AdjointDecay, "builtin:so3");
  decay.format = cli::OutputFormat::Csv;
  const auto d = cli::run(decay);
  EXPECT_EQ(d.exit_code, 1) << d.diagnostic;
  EXPECT_EQ(d.output.substr(0, d.output.find('\n')), "t,distance,bound");

  const auto sim = cli::run(config(cli::Command::AffineSimulate,
                                   write("x.json", R"({"A": [[-1, 0], [0, -2]], "b": [1, 1], "g": {"h": [[1, 0], [0, 1]], "w": [0, 0]}})")));
  EXPECT_EQ(sim.exit_code, 0) << sim.diagnostic;

  auto audit = config(cli::Command::AffineAudit, "builtin:sl2");
  audit.samples = 5;
  const auto a = cli::run(audit);
  EXPECT_EQ(a.exit_code, 1) << a.diagnostic;
  EXPECT_EQ(Json::parse(a.output)["verdict"], "hypothesis-fails");
}

TEST_F(CliTest, ConjugacyBuildRoundTrip) {
  const auto r = cli::run(config(cli::Command::ConjugacyBuild,
                                 write("p.json", R"({"A": [[-1, 0], [0, -2]], "B": [[-1, 1], [-1, -1]],
                                                     "points": [{"g": [[1, 0], [0, 1]], "v": [3, 4]}]})")));
  ASSERT_EQ(r.exit_code, 0) << r.diagnostic;
  const Json j = Json::parse(r.output);
  ASSERT_EQ(j["report"]["points"].size(), 1u);
  EXPECT_LE(j["report"]["max_round_trip_residual"].get<double>(), 1e-6);
}

TEST_F(CliTest, DeterministicBytes) {
  const std::string input = write("p.json", R"({"A": [[-1, 0.5], [0, -2]], "B": [[-1, 1], [-1, -1]]})");
  for (auto c : {cli::Command::Certify, cli::Command::ConjugacyVerify}) {
    EXPECT_EQ(cli::run(config(c, input)).output, cli::run(config(c, input)).output);
  }
  EXPECT_EQ(cli::run(config(cli::Command::AlgebraAudit, "builtin:so3")).output,
            cli::run(config(cli::Command::AlgebraAudit, "builtin:so3")).output);
}

TEST_F(CliTest, JsonReportReparses) {
  const std::string input = write("p.json", R"({"A": [[-1, 0.5], [0, -2]], "B": [[-1, 1], [-1, -1]]})");
  const auto r = cli::run(config(cli::Command::ConjugacyVerify, input));
  const Json j = Json::parse(r.output);
  EXPECT_EQ(dump_canonical(j), r.output);
  const ResidualReport rep = j["report"]["residual"].get<ResidualReport>();
  EXPECT_EQ(Json(rep), j["report"]["residual"]);
}

TEST_F(CliTest, ParseErrorNamesLine) {
  const auto r = cli::run(config(cli::Command::Certify, write("bad.json", "{\n  \"A\": [[1, 2],\n  [3, ]]\n}")));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_TRUE(r.output.empty());
  EXPECT_NE(r.diagnostic.find("bad.json:3"), std::string::npos) << r.diagnostic;
}

TEST_F(CliTest, SchemaErrorNamesFieldAndLine) {
  const auto r = cli::run(config(cli::Command::ConjugacyVerify,
                                 write("bad.json", "{\n  \"A\": [[-1, 0], [0, -1]],\n  \"B\": [[-1, 0], [0]]\n}")));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.diagnostic.find("field 'B'"), std::string::npos) << r.diagnostic;
  EXPECT_NE(r.diagnostic.find("bad.json:3"), std::string::npos) << r.diagnostic;
}

TEST_F(CliTest, MissingFieldAndBadConfig) {
  EXPECT_EQ(cli::run(config(cli::Command::Gl2Classify, write("m.json", R"({"A": [[1, 0], [0, 1]]})"))).exit_code, 2);
  EXPECT_EQ(cli::run(config(cli::Command::Certify, (dir_ / "missing.json").string())).exit_code, 2);
  EXPECT_EQ(cli::run(config(cli::Command::AlgebraAudit, "builtin:e8")).exit_code, 2);
  auto cfg = config(cli::Command::Certify, write("a.json", "[[-1]]"));
  cfg.t_min = 1;
  cfg.t_max = 0;
  EXPECT_EQ(cli::run(cfg).exit_code, 2);
}

TEST_F(CliTest, FormatParsing) {
  EXPECT_EQ(cli::parse_format("csv"), cli::OutputFormat::Csv);
  EXPECT_THROW(cli::parse_format("xml"), Error);
}

TEST_F(CliTest, MainEntryFlags) {
  const std::string input = write("a.json", R"({"A": [[-1, 0], [0, -2]]})");
  const std::string out = (dir_ / "out.json").string();
  const char* argv[] = {"hypflow", "certify", "--input", input.c_str(), "--seed", "7", "--out", out.c_str()};
  EXPECT_EQ(cli::main_entry(8, argv), 0);
  std::ifstream f(out);
  const Json j = Json::parse(f);
  EXPECT_EQ(j["seed"], 7);
  const char* bad_format[] = {"hypflow", "certify", "--input", input.c_str(), "--format", "xml"};
  EXPECT_EQ(cli::main_entry(6, bad_format), 2);
  const char* bad_command[] = {"hypflow", "frobnicate", "--input", input.c_str()};
  EXPECT_EQ(cli::main_entry(4, bad_command), 2);
}
