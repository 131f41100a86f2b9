#pragma once

#include <stdexcept>
#include <string>

namespace jcm {

/// Population would leave the truncated Fock space.
class LeakageError : public std::runtime_error {
 public:
  explicit LeakageError(const std::string& what) : std::runtime_error(what) {}
};

/// Post-selected outcome has (numerically) zero probability.
class OrthogonalOutcomeError : public std::runtime_error {
 public:
  OrthogonalOutcomeError(const std::string& what, double probability)
      : std::runtime_error(what), probability_(probability) {}
  double probability() const { return probability_; }

 private:
  double probability_;
};

/// Invalid parameters or configuration. The message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace jcm
