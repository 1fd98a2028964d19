#pragma once

#include <stdexcept>
#include <string>

namespace smatch {

/// Bad configuration or argument outside its documented domain (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Model parameters violate their invariants (theta, sigma, delta must be positive).
class ParameterDomainError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Base for failures that happen while computing on data (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sample carries too little information for the requested estimator.
class DegenerateSampleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Newton step with a vanishing derivative.
class SingularStepError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Simulated state became non-finite.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, long long step)
        : NumericalError(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    long long step() const noexcept { return step_; }

private:
    long long step_;
};

}  // namespace smatch
