#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gstein {

// Exit statuses of the command line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitSolverRejected = 3;

/// Runs one subcommand; args exclude the program name.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gstein
