#pragma once

#include <stdexcept>

namespace bcgnn {

/// Precondition or input validation failure (bad arguments, malformed files,
/// infeasible requests).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation produces NaN or infinity.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bcgnn
