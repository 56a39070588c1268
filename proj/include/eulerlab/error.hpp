#pragma once

#include <stdexcept>
#include <string>

namespace eulerlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter violates a module precondition (grid size, epsilon range, config key).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Two operands live on different grids.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

/// Requested time step exceeds the CFL bound.
class StepSizeError : public Error {
public:
    StepSizeError(const std::string& what, double admissible_dt)
        : Error(what), admissible_dt_(admissible_dt) {}
    double admissible_dt() const noexcept { return admissible_dt_; }

private:
    double admissible_dt_;
};

/// A time integration aborted (NaN, nonpositive density, Poisson non-convergence).
class SolverAbort : public Error {
public:
    SolverAbort(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace eulerlab
