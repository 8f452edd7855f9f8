#pragma once

#include <stdexcept>
#include <string>

namespace fitcrf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or spec file (bad sizes, non-positive stds, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed or out-of-range input data (negative acceleration, bad month, ...).
struct DataError : Error {
    using Error::Error;
};

/// A fit could not be performed (too few rows, layout mismatch, ...).
struct FitError : Error {
    using Error::Error;
};

/// Training aborted (NaN loss, empty validation split, ...).
struct TrainError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace fitcrf
