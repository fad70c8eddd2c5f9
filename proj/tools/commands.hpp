#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace toolflow::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitEpisodeFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (program name excluded) and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toolflow::cli
