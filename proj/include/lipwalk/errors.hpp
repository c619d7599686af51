#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lipwalk {

// Non-finite inputs, negative durations and similar argument errors.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A physical bound was violated (e.g. step length outside (0, L_max]).
class ConstraintViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested closed-loop poles are not strictly inside the unit circle.
class InvalidPoles : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Uncontrollable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The Riccati iteration hit its cap without settling.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double last_residual, std::size_t iterations)
      : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}

  double last_residual() const noexcept { return last_residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double last_residual_;
  std::size_t iterations_;
};

// Scenario or simulation configuration rejected before any work is done.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lipwalk
