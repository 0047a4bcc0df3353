#pragma once

#include <stdexcept>

namespace cpv {

// Unreadable or malformed input files, schema violations, and incompatible
// intermediate artifacts. The CLI maps this to exit code 1; any other
// exception exits 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cpv
