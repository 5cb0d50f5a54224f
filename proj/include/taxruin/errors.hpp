#pragma once

#include <stdexcept>
#include <string>

namespace taxruin {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the analytic domain of an exponent (at or past a pole).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The model has E[X_1] >= 0, so no positive Lundberg root exists.
class NoPositiveRoot : public Error {
 public:
  using Error::Error;
};

class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// Penalty or formula parameters violate a hypothesis (e.g. eta + lambda - alpha == 0).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Two-sided models have no closed-form Cramer constant; callers must calibrate it.
class NeedsEmpiricalUpsilon : public Error {
 public:
  using Error::Error;
};

class MixedBatch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace taxruin
