#pragma once

#include <stdexcept>
#include <string>

namespace sieve {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad k, bad simplex point, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A convex solver stopped before reaching its gradient tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double gradient_norm)
        : Error(what + " (gradient norm " + std::to_string(gradient_norm) + ")"),
          gradient_norm_(gradient_norm) {}

    double gradient_norm() const noexcept { return gradient_norm_; }

private:
    double gradient_norm_;
};

/// Normal equations are singular, i.e. the design does not certify the basis.
class SingularDesign : public Error {
public:
    using Error::Error;
};

/// The bias profile does not reach far enough for the requested check.
class RangeError : public Error {
public:
    using Error::Error;
};

/// MCMC adaptation or importance sampling failed its diagnostics.
class SamplerError : public Error {
public:
    using Error::Error;
};

}  // namespace sieve
