#pragma once

#include <stdexcept>
#include <string>

namespace adjrk {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A weight b_i is below the zero-weight tolerance, so the adjoint
/// coefficients b_j - (b_j/b_i) a_ji cannot be formed.
class ZeroWeightError : public Error {
 public:
  ZeroWeightError(std::string msg, int stage_index, int partition = 0)
      : Error(std::move(msg)), stage_index(stage_index), partition(partition) {}
  int stage_index;  ///< 0-based stage of the offending weight
  int partition;    ///< 0 for plain tableaus, 1 or 2 for pair components
};

/// Two tableaus that must share a stage count do not.
class StageMismatchError : public Error {
 public:
  using Error::Error;
};

/// A trajectory was produced with a different tableau than the one supplied.
class TableauMismatchError : public Error {
 public:
  using Error::Error;
};

/// An iterative stage solve failed to reach the requested tolerance.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(std::string msg, long step, int iterations, double residual)
      : Error(std::move(msg)), step(step), iterations(iterations), residual(residual) {}
  long step;
  int iterations;
  double residual;
};

/// The state left the domain on which the vector field is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnknownProblemError : public Error {
 public:
  using Error::Error;
};

class UnknownMethodError : public Error {
 public:
  using Error::Error;
};

class InvalidParamError : public Error {
 public:
  InvalidParamError(std::string msg, std::string param)
      : Error(std::move(msg)), param(std::move(param)) {}
  std::string param;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// The separable fast path was requested on a system that is not separable.
class SeparabilityViolationError : public Error {
 public:
  using Error::Error;
};

/// A tableau/matrix/vector file could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (CLI level).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace adjrk
