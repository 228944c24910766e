#pragma once

#include <stdexcept>
#include <string>

namespace wentzell {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix shapes do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Coefficients violate uniform ellipticity or are not finite.
class CoefficientError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration document or kernel descriptor.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation called on an object that does not satisfy its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics failed (eigensolver, root bracketing, fits).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class RootSearchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Resolvent system (lambda M + A) is singular.
class ResolventError : public NumericalError {
 public:
  ResolventError(const std::string& what, double lambda) : NumericalError(what), lambda_(lambda) {}
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

/// An eigenvalue lies on (or too close to) an integration contour.
class ContourError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// exp(tG) would overflow; rescale by exp(-s t) first.
class ScalingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Input data inconsistent with the claimed mathematical relation.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace wentzell
