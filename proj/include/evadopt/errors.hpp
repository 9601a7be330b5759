#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evadopt {

// Base of every error raised by the library. `input_error()` distinguishes
// bad inputs/configuration (CLI exit code 2) from runtime/model failures (1).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual bool input_error() const noexcept { return false; }
};

class InputError : public Error {
public:
    using Error::Error;
    bool input_error() const noexcept override { return true; }
};

// --- model / numerics ------------------------------------------------------

class InvalidModel : public Error {
public:
    using Error::Error;
};

class InvariantViolation : public Error {
public:
    InvariantViolation(const std::string& what, std::size_t step)
        : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class NotApplicable : public Error {
public:
    using Error::Error;
};

class DegenerateProfiles : public Error {
public:
    using Error::Error;
};

class DegenerateData : public Error {
public:
    using Error::Error;
};

class SingleCluster : public Error {
public:
    using Error::Error;
};

class MissingGraph : public Error {
public:
    using Error::Error;
};

// --- inputs ------------------------------------------------------------------

class SchemaMismatch : public InputError {
public:
    using InputError::InputError;
};

class EmptySelection : public InputError {
public:
    using InputError::InputError;
};

class UnknownCode : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

}  // namespace evadopt
