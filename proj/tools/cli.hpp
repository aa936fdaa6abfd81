#pragma once

// The `mlmc` command line. run_cli is the complete program minus process
// setup, so tests drive it in-process with string streams.
//
// Exit codes: 0 success, 2 usage or validation error, 3 numerical failure
// (diverged path, singular transport, degenerate statistics).

#include <iosfwd>

namespace mlmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace mlmc::cli
