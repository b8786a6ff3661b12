#pragma once

#include <stdexcept>
#include <string>

namespace hsps {

/// Root of every error the toolkit throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration (unknown keys, unresolved names, violated invariants).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input outside the domain of a physical model (wavelength range, bin layout).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: non-convergence, non-finite results.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double residual = 0.0)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A closed-form expression is evaluated at one of its singular points.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Input that carries no information (all-zero amplitude, empty filter support).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Bad data handed to a fitter (too few points, non-positive amplitudes).
class DataError : public Error {
public:
    using Error::Error;
};

/// Fitter did not converge.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace hsps
