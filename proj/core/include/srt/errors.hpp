#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srt {

/// Invalid argument to a model or analysis operation (negative workload, q outside (0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Scenario or simulation configuration that cannot be run as given.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line in the scenario file, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A reservation request that violates the reservation feasibility conditions.
class InfeasibleReservation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace srt
