#pragma once

#include <stdexcept>
#include <string>

namespace epsgreedy {

// Error kinds raised across the library. Each derives from the closest
// standard exception so callers may catch either the specific or the
// generic type.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// IDX container errors.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace epsgreedy
