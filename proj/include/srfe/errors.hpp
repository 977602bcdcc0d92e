#pragma once

#include <stdexcept>
#include <string>

namespace srfe {

/// Invalid configuration (bad parameter values, malformed config files).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Complete-scheme feature budget exceeded (n * C(d,q) above the cap).
class BudgetError : public ConfigError {
public:
    explicit BudgetError(const std::string& what) : ConfigError(what) {}
};

/// Mismatched dimensions between points, weights, or coefficients.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Unreadable or malformed input data (CSV rows, model files).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// The residual ball ||Ac - y|| <= radius is empty: no coefficient vector
/// reaches the requested radius. Carries the least-squares certificate.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(double min_residual, double radius)
        : std::runtime_error("bpdn: infeasible radius " + std::to_string(radius) +
                             ", minimum achievable residual " + std::to_string(min_residual)),
          min_residual(min_residual),
          radius(radius) {}

    double min_residual;
    double radius;
};

}  // namespace srfe
