#pragma once

#include <stdexcept>
#include <string>

namespace gsdie {

// Invalid inputs: bad dimensions, out-of-range parameters, malformed files.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numeric failures: singular systems, ill-conditioned kernels, degenerate
// degree estimates.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gsdie
