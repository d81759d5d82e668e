#pragma once

#include <stdexcept>
#include <string>

namespace contagion {

/// Invalid configuration or input data (maps to CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: root solves that do not converge, bad brackets and the
/// like (maps to CLI exit code 2).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Policy form not supported by the requested estimator.
class UnsupportedPolicyError : public std::runtime_error {
 public:
  explicit UnsupportedPolicyError(const std::string& what)
      : std::runtime_error(what) {}
};

/// First-order-condition sign pattern incompatible with the convexity
/// hypothesis; reported instead of silently clamped.
class ConcavityViolation : public NumericError {
 public:
  explicit ConcavityViolation(const std::string& what) : NumericError(what) {}
};

}  // namespace contagion
