#pragma once

#include <stdexcept>
#include <string>

namespace recnet {

// Shapes or settings that do not fit together (dimension mismatch, bad field).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Every optimisation restart diverged.
class FitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace recnet
