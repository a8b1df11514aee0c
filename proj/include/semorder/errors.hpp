#pragma once

#include <stdexcept>
#include <string>

namespace semorder {

/// Caller violated a documented precondition (bad index, malformed config, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Problem size exceeds a hard guard (factorial enumeration, subset DP, design width).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical precondition failed (singular moment matrix and similar).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semorder
