#pragma once

#include <stdexcept>
#include <string>

namespace kcheck {

/// Bad caller input: shapes, domains, missing columns, malformed files.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or iterative method failed on otherwise valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An estimator did not converge (e.g. probit under separation).
class EstimationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Filesystem failure; the message always carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InputError(message);
}

}  // namespace kcheck
