#pragma once

#include <stdexcept>
#include <string>

namespace pzshell {

// Raised for invalid user-facing input: bad run configs, holes that the
// requested resolution cannot resolve, non-positive penalties, etc.
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when material data violates its invariants (symmetry, positivity).
struct MaterialError : ConfigError {
  explicit MaterialError(const std::string& msg) : ConfigError(msg) {}
};

// Raised for degenerate chart geometry (points outside the admissible
// chart domain, vanishing metric determinant).
struct GeometryError : ConfigError {
  explicit GeometryError(const std::string& msg) : ConfigError(msg) {}
};

// Raised when a linear solve fails or the residual check does not pass.
// The CLI maps this to exit code 3.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pzshell
