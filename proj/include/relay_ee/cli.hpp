#pragma once

#include <iosfwd>

namespace relay_ee::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitGuardRail = 3;

/// Entry point of the `relay-ee` tool with injectable streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relay_ee::cli
