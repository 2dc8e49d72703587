#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace qsim {

/// Short "%g" rendering of a number for error messages.
inline std::string describe(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Bad input: malformed configuration, out-of-domain parameters, invalid states.
/// The CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure of a numerical procedure on otherwise valid input. CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidStateError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnsupportedParameterError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class OutOfRangeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyInputError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Bad command line, e.g. an unknown figure id.
class UsageError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StiffnessError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The observable never rose above the end-of-epidemic threshold.
class NoEpidemicError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The observable did not fall back below the threshold before the horizon.
class HorizonTooShortError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonMonotoneError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace qsim
