#pragma once

#include <iosfwd>
#include <string>

#include "qkd/session.hpp"

namespace qkd::cli {

// Exit codes: distinct classes so scripts can tell a failed check from a
// mis-typed invocation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // verify mismatch, |z| > 5, key mismatch
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;  // enumeration request over the n <= 16 cap

// Flat key/value session config ("key = value" lines, # comments).
// Throws ConfigError naming the offending field.
SessionConfig parse_session_config(std::istream& in);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qkd::cli
