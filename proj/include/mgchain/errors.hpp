#pragma once

#include <stdexcept>
#include <string>

namespace mgchain {

// Invalid physical or numerical input (bad site index, non-integer sector
// polarization, mismatched dimensions, ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed run configuration (unknown key, unparsable value, missing
// required option).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A request that is structurally valid but exceeds the configured resource
// limits, e.g. asking for a full dense spectrum above the dense threshold.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative eigensolver failed to reach the requested residual.  Carries the
// best residual achieved so callers can report how close the run got.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}

    double best_residual() const { return best_residual_; }

private:
    double best_residual_ = 0.0;
};

} // namespace mgchain
