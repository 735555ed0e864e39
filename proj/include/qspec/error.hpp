#pragma once

#include <stdexcept>
#include <string>

namespace qspec {

// Malformed inputs: bad arguments, parse failures, dimension guards.
struct value_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failures: solver non-convergence, invariant violations.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qspec
