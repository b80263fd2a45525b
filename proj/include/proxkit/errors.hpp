#pragma once

#include <stdexcept>
#include <string>

namespace proxkit {

// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A scalar parameter is outside its admissible range (e.g. a nonpositive step).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A solver configuration violates a convergence precondition.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Breakdown inside a numerical kernel: negative curvature, singular Newton
// system, line-search underflow, undefined extended-real arithmetic.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace proxkit
