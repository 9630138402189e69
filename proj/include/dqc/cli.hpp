#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dqc {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitDataError = 1,    // unreadable or malformed input
  kExitConfigError = 2,  // invalid arguments or configuration
  kExitNumericError = 3, // internal numerical failure
};

/// Entry point of the `dqc` tool. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dqc
