#pragma once

#include <stdexcept>
#include <string>

namespace frag {

/// Malformed or schema-violating run configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs outside the admissible parameter domain, or a model that fails
/// validation (CLI exit code 2).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure while computing (CLI exit code 3).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace frag
