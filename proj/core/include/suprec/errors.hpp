#pragma once

#include <stdexcept>
#include <string>

namespace suprec {

/// A user-supplied configuration value violates its contract.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function argument is outside the operation's domain.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request exceeds an enforced problem-size guard.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A closed-form expression is undefined for the given inputs.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace suprec
