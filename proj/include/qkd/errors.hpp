#pragma once

#include <stdexcept>

namespace qkd {

// Invalid geometry or parameters: non-power-of-two frame, k not dividing n, ...
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An assignment message whose group map violates the scheme's partition rule.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed wire bytes: bad magic, truncated payload, CRC mismatch, field range.
struct WireError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request exceeds a hard enumeration budget (2^n frame sweeps).
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qkd
