#pragma once

#include <iosfwd>

namespace splitting::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;

/// Parses argv and dispatches to run, compare or check. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace splitting::cli
