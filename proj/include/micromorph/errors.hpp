#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace micromorph {

/// Base of every error the engine raises. `kind()` is a short, stable,
/// machine-parsable class name used by the command-line front end.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class ParameterError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "parameter-error"; }
};

class RangeError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "range-error"; }
};

/// Raised when an operator that must be positive definite shows
/// non-positive curvature.
class DefinitenessError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "definiteness-error"; }
};

/// Iterative method ran out of iterations. `history()` holds the residuals
/// or contraction ratios observed so far.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}
    const char* kind() const noexcept override { return "convergence-error"; }
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

class CoercivityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "coercivity-error"; }
};

/// A material violates a hypothesis required by the requested computation.
class HypothesisError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "hypothesis-error"; }
};

}  // namespace micromorph
