#pragma once

#include <stdexcept>
#include <string>

namespace lscope {

// Invalid configuration or parameter file contents (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Integrator or truncation convergence failure (CLI exit code 3).
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate or unlabeled dressed spectrum.
struct DegeneracyError : std::runtime_error {
    explicit DegeneracyError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lscope
