#include "hypflow/error.hpp"

#include <sstream>

namespace hypflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::NotInSpan: return "NotInSpan";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

namespace {

std::string describe_witness(std::complex<double> mu, double abscissa) {
  std::ostringstream os;
  os.precision(17);
  os << "eigenvalue " << mu.real() << (mu.imag() < 0 ? " - " : " + ") << std::abs(mu.imag())
     << "i has non-negative real part (abscissa " << abscissa << ")";
  return os.str();
}

}  // namespace

NotHyperbolicError::NotHyperbolicError(std::complex<double> witness, double abscissa)
    : Error(ErrorKind::NotHyperbolic, describe_witness(witness, abscissa)),
      witness_(witness),
      abscissa_(abscissa) {}

}  // namespace hypflow
