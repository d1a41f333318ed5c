#pragma once

#include <stdexcept>
#include <string>

namespace contab {

// Error taxonomy shared by all modules.  The CLI maps these onto exit codes:
// input/domain problems -> 1, resource caps -> 2, failed convergence -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Anything wrong with user-supplied margins or parameters.
struct InvalidMargins : Error {
    using Error::Error;
};

struct SumMismatch : InvalidMargins {
    using InvalidMargins::InvalidMargins;
};

struct EmptyMargin : InvalidMargins {
    using InvalidMargins::InvalidMargins;
};

// Structured-margin construction produced a zero entry (e.g. floor(C*n) = 0),
// or a zero margin reached a solver that cannot strip it.
struct DegenerateMargin : InvalidMargins {
    using InvalidMargins::InvalidMargins;
};

// Total N = 0 where a positive total is required (independence table).
struct ZeroTotal : InvalidMargins {
    using InvalidMargins::InvalidMargins;
};

// Argument outside the mathematical domain of a closed-form evaluator.
struct DomainError : Error {
    using Error::Error;
};

// B is within 1e-12 of the critical value: the subcritical constants D, E
// are undefined there (their denominator vanishes).
struct CriticalPoint : DomainError {
    using DomainError::DomainError;
};

// The counting DP exceeded its configured cap on live states.
struct ResourceLimit : Error {
    using Error::Error;
};

// Iterative solver ran out of iterations; carries the last residual seen.
struct NoConvergence : Error {
    NoConvergence(const std::string& what, double residual_)
        : Error(what), residual(residual_) {}
    double residual;
};

// Exact-rational heuristic evaluation refused by the size policy
// (mn above the configured cell cap).
struct ExactOverflow : Error {
    using Error::Error;
};

// Block reduction has an empty feasibility interval.  Unreachable for
// validated Barvinok parameters (kept as a defensive guard).
struct InfeasibleBlock : Error {
    using Error::Error;
};

}  // namespace contab
