#pragma once

#include <stdexcept>
#include <string>

namespace simma {

// Shared failure types. The CLI maps these onto exit codes: ConfigError -> 64,
// DomainError and its children -> 65, IoError -> 66.

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Kernel has no time derivative in the sense the criteria need.
struct NotAbsolutelyContinuous : DomainError {
    using DomainError::DomainError;
};

// A characteristic integral does not exist for the requested arguments.
struct NonIntegrable : DomainError {
    using DomainError::DomainError;
};

// A closed-form route was asked about an object that is not well defined
// (e.g. a mixed Ornstein-Uhlenbeck process whose rate mixture integrates 1/|v| to infinity).
struct WellDefinednessViolation : DomainError {
    using DomainError::DomainError;
};

// The requested process is a.s. constant (no Gaussian part, no jumps).
struct NonDeterministic : DomainError {
    using DomainError::DomainError;
};

// Mark weights cannot be normalized into a sampling distribution.
struct UnnormalizableMarks : DomainError {
    using DomainError::DomainError;
};

// Path statistics asked for with too little data.
struct InsufficientPaths : DomainError {
    using DomainError::DomainError;
};

// Series centering is only implemented for the driver families where it has
// a closed inner expectation.
struct CenteringNotImplemented : DomainError {
    using DomainError::DomainError;
};

// Config file rejected; message carries line number and key.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace simma
