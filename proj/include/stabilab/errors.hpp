#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stabilab {

/// Bad argument supplied by the caller (dimension mismatch, out-of-range value).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Missing or inconsistent configuration (e.g. no Lipschitz model where one is required).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A user-supplied coefficient or initial-segment callable produced a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The delay function evaluated outside its admissible range (0, tau_max].
class ModelViolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scheme step produced a non-finite state.
class OverflowError : public std::runtime_error {
public:
    OverflowError(const std::string& msg, std::int64_t step)
        : std::runtime_error(msg), step_index(step) {}
    std::int64_t step_index;
};

/// The implicit solver did not reach the residual tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : std::runtime_error(msg), final_residual(residual) {}
    double final_residual;
};

/// Ensemble estimation became impossible (e.g. every path diverged).
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Regression failure in decay-rate fitting (too few usable points).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stabilab
