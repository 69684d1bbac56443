#pragma once

#include <stdexcept>
#include <string>

namespace alk {

// Bad caller input: malformed field data, square delta, zero conductor...
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Enumeration would exceed the configured vector budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hensel or floating precision too low to decide a result.
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace alk
