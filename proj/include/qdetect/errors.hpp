#pragma once

#include <stdexcept>
#include <string>

namespace qdetect {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operands with incompatible dimensions.
struct DimensionError : Error {
    using Error::Error;
};

// A value object would violate its invariants (non-Hermitian input,
// negative eigenvalue beyond tolerance, priors not summing to one, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Malformed input file or JSON document.
struct ParseError : Error {
    using Error::Error;
};

// An iterative solve hit its cap or stalled before reaching tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

}  // namespace qdetect
