#pragma once

#include <stdexcept>
#include <string>

namespace whitham {

// Base for every error raised by the library. Callers that only care about
// "something failed" catch this; the CLI maps subclasses to exit diagnostics.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGridError : public Error {
public:
    using Error::Error;
};

// KdV symbol evaluated without a wave speed.
class MissingParameterError : public Error {
public:
    using Error::Error;
};

class SingularJacobianError : public Error {
public:
    using Error::Error;
};

// First Newton solve of a continuation run did not converge.
class BranchStartError : public Error {
public:
    using Error::Error;
};

// Fixed-point sweep of the midpoint stepper exceeded its iteration cap.
class StepNonconvergenceError : public Error {
public:
    explicit StepNonconvergenceError(const std::string& what, int sweeps)
        : Error(what), sweeps_(sweeps) {}
    int sweeps() const noexcept { return sweeps_; }

private:
    int sweeps_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class VersionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace whitham
