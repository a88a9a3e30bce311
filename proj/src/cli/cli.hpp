#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace improvable::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitOracleFailure = 3;

// Runs one invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace improvable::cli
