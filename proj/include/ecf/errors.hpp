#pragma once

#include <stdexcept>
#include <string>

namespace ecf {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when no eigenvalue of the transverse operator exceeds the
/// background light line, i.e. the structure guides nothing.
class NoGuidedModeError : public Error {
public:
  explicit NoGuidedModeError(const std::string& what) : Error(what) {}
};

/// Eigensolver failed to converge; carries the iteration count reached.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, int iterations)
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  int iterations() const { return iterations_; }

private:
  int iterations_;
};

/// Configuration file problem; message carries the offending key path.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

} // namespace ecf
