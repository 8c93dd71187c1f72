#pragma once

#include <stdexcept>
#include <string>

namespace tikflow {

/// Invalid configuration or parameters, detected before any computation.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation not supported by the problem (e.g. gradient of a nonsmooth f).
class unsupported_operation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Base for runtime numerical failures.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative subproblem solver exhausted its budget.
class convergence_failure : public numerical_error {
public:
    using numerical_error::numerical_error;
};

/// Time integration failed; carries the time at which the failure occurred.
class integration_failure : public numerical_error {
public:
    integration_failure(const std::string& msg, double time)
        : numerical_error(msg + " (t=" + std::to_string(time) + ")"), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Observable hit zero or the noise floor inside a fit window.
class degenerate_data_error : public numerical_error {
public:
    degenerate_data_error(const std::string& msg, double floor_time)
        : numerical_error(msg + " (floor at t=" + std::to_string(floor_time) + ")"),
          floor_time_(floor_time) {}
    double floor_time() const { return floor_time_; }

private:
    double floor_time_;
};

/// Sample grid too sparse for the requested quadrature accuracy.
class insufficient_samples_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

}  // namespace tikflow
