#pragma once

#include <stdexcept>
#include <string>

namespace precmat {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cholesky pivot was non-positive or not finite: the input is not a
/// positive definite matrix. The solvers use this as their restart signal.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

/// The iterative symmetric eigensolver failed to converge.
struct ConvergenceFailure : Error {
  using Error::Error;
};

/// The step-size restart loop ran out of attempts.
struct MaxRestartsExceeded : Error {
  using Error::Error;
};

/// An iterate or objective value became NaN/Inf, which signals corrupted
/// input rather than a recoverable solver state.
struct NonFiniteObjective : Error {
  using Error::Error;
};

/// A batch or averaging schedule violates its summability constraints.
struct InvalidSchedule : Error {
  using Error::Error;
};

/// Malformed input file; message carries line/column information.
struct ParseError : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// A matrix read as a covariance deviates from symmetry beyond tolerance.
struct NotSymmetric : Error {
  using Error::Error;
};

}  // namespace precmat
