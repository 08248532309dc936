#pragma once

#include <stdexcept>
#include <string>

namespace relpca {

// Three failure families, mapped to CLI exit codes:
//   ConfigError -> 2, DataError -> 3, NumericError -> 4.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};
struct NumericError : Error {
    using Error::Error;
};

// dataset / IO
struct BadMagic : DataError {
    using DataError::DataError;
};
struct Truncated : DataError {
    using DataError::DataError;
};
struct InsufficientClassCount : DataError {
    using DataError::DataError;
};
struct DimensionMismatch : DataError {
    using DataError::DataError;
};
struct LengthMismatch : DataError {
    using DataError::DataError;
};
struct EmptyTrainingSet : DataError {
    using DataError::DataError;
};

// configuration
struct InsufficientSamples : ConfigError {
    using ConfigError::ConfigError;
};
struct KOutOfRange : ConfigError {
    using ConfigError::ConfigError;
};

// numerics
struct NotSymmetric : NumericError {
    using NumericError::NumericError;
};
struct DegenerateEigenvalue : NumericError {
    using NumericError::NumericError;
};
struct NonPositiveEigenvalue : NumericError {
    using NumericError::NumericError;
};

}  // namespace relpca
