#pragma once

#include <stdexcept>
#include <string>

namespace solerwave {

//! Iteration cap reached or a solver failed to meet its tolerance.
struct NoConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! A shooting bracket could not be established.
struct BracketError : NoConvergenceError {
  using NoConvergenceError::NoConvergenceError;
};

//! Two grids that must coincide do not.
struct GridMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

//! A linear operator could not be factorized.
struct SingularOperatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! The Lorentz scalar V^2 - eps^2 U^2 left the positive regime while the
//! leading exponent is below one, so f' is singular there.
struct PositivityLossError : std::domain_error {
  using std::domain_error::domain_error;
};

//! An observable was requested from a profile whose stationary residual is
//! too large for the identity behind the formula to hold.
struct StaleProfileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! A fit or evaluation window does not fit inside the grid.
struct WindowError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

}  // namespace solerwave
