#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace afshar {

// Exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime or computation failure
inline constexpr int kExitUsage = 2;    // invalid arguments or configuration

// Subcommands: analytic, scan, campaign, hbt, map.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace afshar
