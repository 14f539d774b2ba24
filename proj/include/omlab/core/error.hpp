#pragma once

#include <stdexcept>
#include <string>

namespace omlab {

// Caller broke a documented precondition (shape mismatch, step after done, ...).
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Bad wiring between components (incompatible opponent/env, missing checkpoint, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or insufficient data (missing opponent id in a dataset, ...).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid CLI / harness usage (unknown axis, empty input, ...).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation not defined for the given object (DP oracle on an infinite-state opponent, ...).
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric undefined on the given sample (single-id MI, single-sample classes, ...).
struct MetricError : std::runtime_error {
    explicit MetricError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractViolation(msg);
}

}  // namespace omlab
