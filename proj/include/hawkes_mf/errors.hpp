#pragma once

#include <stdexcept>
#include <string>

namespace hawkes_mf {

// Bad numeric argument: probabilities outside [0,1], odd sizes, empty graphs.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Function evaluated outside its domain (negative time, beyond a tabulated grid).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Caller broke a documented precondition (unsorted events, mismatched grids).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Object is missing data needed by the requested operation.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Transfer function or kernel lacks a capability (derivative, finite bound).
class CapabilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SchemeMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class StepSizeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Experiment requested in the wrong excitation regime (p = 1/2 vs p != 1/2).
class RegimeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Configuration file failed validation; message carries the JSON field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(path) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace hawkes_mf

namespace hawkes_mf {

// Thinning needs a finite envelope ||h||.
class UnsupportedTransferError : public CapabilityError {
public:
    using CapabilityError::CapabilityError;
};

} // namespace hawkes_mf
