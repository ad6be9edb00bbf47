#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hypflow {

enum class ErrorKind {
  NonFinite,
  NoConvergence,
  NotStable,
  NotHyperbolic,
  DimensionMismatch,
  ZeroVector,
  NotInSpan,
  InvalidArgument,
  UnsupportedFormat,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by certify() when some eigenvalue has non-negative real part.
class NotHyperbolicError : public Error {
 public:
  NotHyperbolicError(std::complex<double> witness, double abscissa);

  std::complex<double> witness() const noexcept { return witness_; }
  double abscissa() const noexcept { return abscissa_; }

 private:
  std::complex<double> witness_;
  double abscissa_;
};

}  // namespace hypflow
