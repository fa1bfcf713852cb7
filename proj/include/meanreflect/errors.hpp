#pragma once

#include <stdexcept>
#include <string>

namespace meanreflect {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad caller input: empty grids, negative tolerances, mismatched shapes, ...
class InvalidArgumentError : public Error {
public:
    explicit InvalidArgumentError(const std::string& what) : Error(what) {}
};

// A reflection problem is ill-posed: the starting point (or a required band
// condition) violates the constraints. Carries the offending time.
class ConstraintViolationError : public Error {
public:
    ConstraintViolationError(const std::string& what, double time)
        : Error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

// An iterative method failed to converge. Carries the last residual.
class NumericalFailureError : public Error {
public:
    NumericalFailureError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Config-file problems: parse errors (line/column) and schema violations.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace meanreflect
