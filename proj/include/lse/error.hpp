#pragma once

#include <stdexcept>
#include <string>

namespace lse {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable input (files, flags, argument values).
class InputError : public Error {
public:
    using Error::Error;
};

/// A factorization failed or a system is numerically singular.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Cx = d has no solution where one is required.
class InconsistentConstraintsError : public Error {
public:
    InconsistentConstraintsError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// An iterative solve did not meet its tolerance and strict mode was requested.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace lse
