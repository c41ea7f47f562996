#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tunnelstat {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitCalibration = 3,
  kExitDegenerate = 4,
  kExitAllInvalid = 5,
};

/// Runs one command line (args excludes the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tunnelstat
