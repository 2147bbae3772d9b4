#pragma once

#include <stdexcept>
#include <string>

namespace pinn {

/// Operands from different tapes, length mismatches, roots that live elsewhere.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Mathematical domain violations such as division by zero.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid user configuration: empty data sets, bad intervals, unknown keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values met during integration or training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output directories or files that cannot be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pinn
