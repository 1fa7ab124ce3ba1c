#pragma once

#include <stdexcept>
#include <string>

namespace vvlab {

// Malformed or inconsistent input (bad config field, invalid parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine did not meet its declared tolerance or could not
// produce a value (quadrature failure, empty search range, no data).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed result contradicts an invariant that must hold (e.g. lower
// bound above upper bound).
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vvlab
