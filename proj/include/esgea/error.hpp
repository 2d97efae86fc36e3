#pragma once

#include <stdexcept>
#include <string>

namespace esgea {

/// Bad caller input: invalid parameters, contract violations.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent data read from disk or passed across a boundary.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver failure (non-convergence, non-finite values).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esgea
