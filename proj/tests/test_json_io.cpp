#include <gtest/gtest.h>

#include <cmath>

#include "hypflow/error.hpp"
#include "hypflow/json_io.hpp"

using namespace hypflow;

TEST(CanonicalJson, SortedKeysAndFullPrecision) {
  const Json j{{"zeta", 0.1}, {"alpha", std::vector<double>{1.0 / 3.0, 2}}, {"bad", NAN}};
  const std::string s = dump_canonical(j);
  EXPECT_LT(s.find("alpha"), s.find("bad"));
  EXPECT_LT(s.find("bad"), s.find("zeta"));
  EXPECT_NE(s.find("0.33333333333333331"), std::string::npos);
  EXPECT_NE(s.find("\"bad\": null"), std::string::npos);
  EXPECT_EQ(Json::parse(s)["alpha"][0].get<double>(), 1.0 / 3.0);
}

TEST(MatrixJson, RoundTripAndRejection) {
  const Matrix m{{1.5, -2}, {1e-300, 3}};
  EXPECT_EQ(matrix_from_json(Json::parse(dump_canonical(matrix_to_json(m)))), m);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, 2], [3]]")), Error);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, \"x\"]]")), Error);
  EXPECT_THROW(matrix_from_json(Json::parse("[]")), Error);
}

TEST(LiftedPointJson, RoundTrip) {
  const LiftedPoint x{Matrix{{1, 2}, {3, 4}}, {0.1, -0.2}};
  const Json j = x;
  EXPECT_TRUE(j.contains("g"));
  EXPECT_TRUE(j.contains("v"));
  EXPECT_EQ(j.get<LiftedPoint>(), x);
}

TEST(AffineJson, RoundTrip) {
  const AffineElement x{Matrix{{2, 0}, {1, 1}}, {3, 4}};
  const Json j = x;
  EXPECT_TRUE(j.contains("h"));
  EXPECT_EQ(j.get<AffineElement>(), x);
}

TEST(ReportJson, ResidualAndDecayRoundTrip) {
  const ConjugacyData cd(certify(Matrix{{-1, 0}, {0, -2}}), certify(Matrix{{-1, 1}, {-1, -1}}));
  VerifyOptions opts;
  opts.samples = 10;
  const ResidualReport r = verify_conjugacy(cd, opts);
  const Json j = Json::parse(dump_canonical(Json(r)));
  EXPECT_EQ(j.get<ResidualReport>(), r);
  EXPECT_TRUE(j.contains("argmax"));

  const DecayReport d = decay_on_linear_path(-Matrix::identity(2), Matrix{{2, 0}, {0, 3}}, TimeGrid{});
  const DecayReport back = Json::parse(dump_canonical(Json(d))).get<DecayReport>();
  EXPECT_EQ(back.status, d.status);
  EXPECT_EQ(back.constant, d.constant);
  EXPECT_EQ(back.curve.size(), d.curve.size());
}

TEST(AlgebraJson, RoundTrip) {
  const LieAlgebraSpec sl2 = builtin_algebra("sl2");
  const LieAlgebraSpec back = algebra_from_json(Json::parse(dump_canonical(algebra_to_json(sl2))), "sl2");
  EXPECT_EQ(killing_gram(back), killing_gram(sl2));
  EXPECT_TRUE(back.has_realization());
}

TEST(AlgebraJson, AntisymmetricCompletionAndDefaults) {
  const Json j = Json::parse(R"({"dim": 2, "structure": [{"i": 1, "j": 0, "coeffs": [0, -1]}]})");
  const LieAlgebraSpec s = algebra_from_json(j);
  EXPECT_EQ(s.c(0, 1, 1), 1.0);
  EXPECT_EQ(s.c(1, 0, 1), -1.0);
  EXPECT_EQ(s.basis().size(), 2u);
}

TEST(AlgebraJson, ErrorsNameTheField) {
  try {
    algebra_from_json(Json::parse(R"({"dim": 2, "structure": [{"i": 0, "j": 5, "coeffs": [0, 1]}]})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("field"), std::string::npos) << e.what();
  }
}
