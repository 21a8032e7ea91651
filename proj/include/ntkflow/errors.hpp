#pragma once

#include <stdexcept>
#include <string>

namespace ntkflow {

/// Configuration / input contract violations. CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failures (degeneracy, loss of positive definiteness, integrator
/// breakdown, exhausted sampling budgets). CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class DegenerateGroundStateError : public NumericalError {
public:
    explicit DegenerateGroundStateError(const std::string& msg) : NumericalError(msg) {}
};

} // namespace ntkflow
