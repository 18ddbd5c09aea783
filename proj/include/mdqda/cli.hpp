#pragma once

// Command-line front end: simulate, theory, fit, predict, oracle.
// Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.

#include <ostream>

namespace mdqda::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mdqda::cli
