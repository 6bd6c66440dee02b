#pragma once

#include <stdexcept>
#include <string>

namespace kappadyn {

// Invalid scenario or parameter input. CLI exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure during computation (non-finite fields, overflow). CLI exit code 2.
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File system or serialization failure. CLI exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kappadyn
