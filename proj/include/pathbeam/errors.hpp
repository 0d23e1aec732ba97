#pragma once

#include <stdexcept>
#include <string>

namespace pathbeam {

/// Bad arguments or violated preconditions (dimension mismatch, non-Hermitian
/// input, empty stream list, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (bisection did not terminate, non-finite
/// intermediate value, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The right-hand matrix of a generalized eigenproblem is not positive
/// definite, so the pencil cannot be reduced by Cholesky.
class SingularPencilError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A zero-forcing construction lost the useful signal (projected Gram
/// singular).
class DegenerateGeometryError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// No valid transmit/receive split of the interfering paths exists.
class FeasibilityError : public std::runtime_error {
 public:
  FeasibilityError(const std::string& what, int deficit)
      : std::runtime_error(what), deficit_(deficit) {}

  /// Number of interfering path directions that could not be assigned.
  int deficit() const { return deficit_; }

 private:
  int deficit_;
};

/// Invalid or incomplete sweep configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pathbeam
