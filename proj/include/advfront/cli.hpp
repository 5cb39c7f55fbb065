#pragma once

#include <string>
#include <vector>

namespace advfront {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNumeric = 3 };

/// Entry point of the `advfront` tool. Subcommands: gen-data, train,
/// frontier, evaluate, converge.
int run_cli(int argc, char** argv);

/// Same as run_cli with `args` excluding the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace advfront
