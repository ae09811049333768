#pragma once

#include <stdexcept>
#include <string>

namespace addyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trait or argument lies outside the domain where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A modelling assumption (positivity of r, kernel domination, ...) fails.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// A linear system or closed form is singular within tolerance.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an interface contract (length mismatch, duplicate traits).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A fitness sign needed for a discrete decision is within tolerance of zero.
class AmbiguousSignError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure (quadrature, rejection sampling, ...) failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Configuration file could not be parsed or is incomplete.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace addyn
