#pragma once

#include <stdexcept>
#include <string>

namespace wgf {

/// Invalid user input: bad parameters, unknown config keys, malformed files.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation ran but its result cannot be trusted (norm drift,
/// non-unitary monodromy, boundary leakage, no bound mode, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wgf
