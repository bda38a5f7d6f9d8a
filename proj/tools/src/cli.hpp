#pragma once

#include <ostream>

namespace octaframe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitNonApplicable = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitUsage = 64;

/// Parses and runs one subcommand. Messages go to `out` / `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace octaframe::cli
