#pragma once

#include <stdexcept>
#include <string>

namespace plate {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates an operation's precondition (the caller asked for something
/// the model does not define). The CLI maps these to exit status 2.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed on otherwise valid input (exit status 1).
class NumericError : public Error {
public:
    using Error::Error;
};

class DomainError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class DimensionMismatch : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class NonPositiveStiffnessParameters : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class NotInstabilityClass : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class PreconditionFailed : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class WindowTooLong : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class BracketingFailure : public NumericError {
public:
    using NumericError::NumericError;
};

class NonConvergence : public NumericError {
public:
    using NumericError::NumericError;
};

class StepSizeUnderflow : public NumericError {
public:
    using NumericError::NumericError;
};

class EnergyDriftExceeded : public NumericError {
public:
    using NumericError::NumericError;
};

class PeriodMismatch : public NumericError {
public:
    using NumericError::NumericError;
};

class NoOnsetFound : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace plate
