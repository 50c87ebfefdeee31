#pragma once

#include <stdexcept>
#include <string>

namespace anticonc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A measure, coefficient vector or weight specification violates its invariants.
class InvalidMeasureError : public Error {
public:
    using Error::Error;
};

/// Operands live in different dimensions, or an operation is unsupported in this dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input does not satisfy an operation's precondition.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

class InsufficientSamplesError : public Error {
public:
    using Error::Error;
};

/// Exact computation would exceed the configured enumeration or memory budget.
class InstanceTooLargeError : public Error {
public:
    using Error::Error;
};

/// The sub-measure V = f*G has zero total mass.
class EmptySubmeasureError : public Error {
public:
    using Error::Error;
};

/// G{|z| >= delta} = 0 for every requested threshold.
class ZeroTailError : public Error {
public:
    using Error::Error;
};

/// The symmetrized law is concentrated at zero.
class DegenerateLawError : public Error {
public:
    using Error::Error;
};

class TooManyGeneratorsError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature hit its refinement limit; carries the best available estimate.
class UnconvergedError : public Error {
public:
    UnconvergedError(const std::string& what, double best_estimate, double last_change)
        : Error(what), best_estimate_(best_estimate), last_change_(last_change) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double last_change() const noexcept { return last_change_; }

private:
    double best_estimate_;
    double last_change_;
};

}  // namespace anticonc
