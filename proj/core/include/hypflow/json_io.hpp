#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "hypflow/affine.hpp"
#include "hypflow/conjugacy.hpp"
#include "hypflow/lie_algebra.hpp"
#include "hypflow/lifted_flow.hpp"
#include "hypflow/linalg.hpp"

namespace hypflow {

using Json = nlohmann::json;

/// Sorted keys, two-space indent, doubles with 17 significant digits and
/// non-finite values written as null.
std::string dump_canonical(const Json& j);

// Matrices are arrays of row arrays of finite doubles; ragged input is rejected.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Vector vector_from_json(const Json& j);

void to_json(Json& j, const Matrix& m);
void from_json(const Json& j, Matrix& m);
void to_json(Json& j, const LiftedPoint& x);
void from_json(const Json& j, LiftedPoint& x);
void to_json(Json& j, const AffineElement& x);
void from_json(const Json& j, AffineElement& x);
void to_json(Json& j, const AffineGenerator& x);
void from_json(const Json& j, AffineGenerator& x);
void to_json(Json& j, const Spectrum& s);
void from_json(const Json& j, Spectrum& s);
void to_json(Json& j, const HyperbolicityCertificate& c);
void from_json(const Json& j, HyperbolicityCertificate& c);
void to_json(Json& j, const ResidualReport& r);
void from_json(const Json& j, ResidualReport& r);
void to_json(Json& j, const PairClassification& c);
void from_json(const Json& j, PairClassification& c);
void to_json(Json& j, const SemisimplicityVerdict& v);
void to_json(Json& j, const HypothesisWitness& w);
void to_json(Json& j, const TransferAudit& a);
void to_json(Json& j, const DecayReport& r);
void from_json(const Json& j, DecayReport& r);
void to_json(Json& j, const TransversalityReport& r);
void to_json(Json& j, const AffineAudit& a);

/// {"dim", "basis", "structure": [{"i","j","coeffs"}], "realization"?}.
Json algebra_to_json(const LieAlgebraSpec& spec);
LieAlgebraSpec algebra_from_json(const Json& j, const std::string& name = "custom");

}  // namespace hypflow
