#pragma once

#include <stdexcept>
#include <string>

namespace tfmm {

// Base for all input-validation failures. The message names the violated
// invariant so the CLI can surface it verbatim.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SumNotOne : ValidationError {
    using ValidationError::ValidationError;
};

struct OutOfBounds : ValidationError {
    using ValidationError::ValidationError;
};

struct BadLength : ValidationError {
    using ValidationError::ValidationError;
};

struct DimensionMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct IndexOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};

struct NotAtEquilibrium : ValidationError {
    using ValidationError::ValidationError;
};

struct MidpointOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};

struct InvalidDelta : ValidationError {
    using ValidationError::ValidationError;
};

struct StartMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};

struct InsufficientHistory : ValidationError {
    using ValidationError::ValidationError;
};

struct ConfigMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct CsvParseError : ValidationError {
    using ValidationError::ValidationError;
};

}  // namespace tfmm
