#pragma once
#include <stdexcept>
#include <string>

namespace islm {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent model parameters (violated positivity/interval
/// constraints, equilibrium rate at or below the liquidity pole, ...).
struct ParameterError : Error {
    using Error::Error;
};

/// A state or argument left the admissible region (r ≤ r₂ or Y ≤ 0).
struct DomainError : Error {
    using Error::Error;
};

/// The requested step size does not divide the delay.
struct StepError : Error {
    using Error::Error;
};

/// Analysis cannot proceed: vanishing denominator, boundary coefficient,
/// non-transversal crossing, or no stability switch exists.
struct DegenerateError : Error {
    using Error::Error;
};

/// No delay in the searched window satisfies the crossing residual bound.
struct BranchError : Error {
    using Error::Error;
};

/// An iterative solver exhausted its iteration budget.
struct NoConvergenceError : Error {
    using Error::Error;
};

/// A dense linear solve is numerically singular (pivot-ratio condition
/// estimate beyond the acceptance threshold).
struct SingularSystemError : Error {
    using Error::Error;
};

/// A trajectory or sample set is too short for the requested estimate.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// The reduced-equation state exceeded the overflow guard.
struct OverflowError : Error {
    using Error::Error;
};

/// File could not be read, parsed, or written.
struct IoError : Error {
    using Error::Error;
};

} // namespace islm
