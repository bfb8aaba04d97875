#pragma once

#include <stdexcept>
#include <string>

namespace kinvlap {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration, file format, or parameter (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A numerical self-check failed hard, e.g. a Fourier block far from
/// Hermitian (CLI exit code 3).
class NumericalIntegrityError : public Error {
 public:
  explicit NumericalIntegrityError(const std::string& what) : Error(what) {}
};

/// Cross-validation against an independent reference failed (CLI exit code 4).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Runtime numerical failure such as a vanishing denominator (CLI exit code 5).
class NumericalRuntimeError : public Error {
 public:
  explicit NumericalRuntimeError(const std::string& what) : Error(what) {}
};

}  // namespace kinvlap
