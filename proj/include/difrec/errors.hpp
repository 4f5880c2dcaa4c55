#pragma once

#include <stdexcept>
#include <string>

namespace difrec {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or length mismatch between arrays.
struct DimensionError : Error {
    using Error::Error;
};

// Out-of-range time step or element index.
struct IndexError : Error {
    using Error::Error;
};

// Invalid configuration value or unsatisfiable request.
struct ConfigError : Error {
    using Error::Error;
};

// Malformed input file (reports the offending line).
struct ParseError : Error {
    using Error::Error;
};

// Zero-norm vector fed to a normalized similarity.
struct DegenerateInputError : Error {
    using Error::Error;
};

// Missing or corrupt checkpoint.
struct IntegrityError : Error {
    using Error::Error;
};

// Non-finite loss or parameters during training.
struct DivergenceError : Error {
    using Error::Error;
};

// File read/write failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace difrec
