#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace massent::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kNumerical = 3 };

/// Runs the command line (without the program name). Data goes to out unless
/// --output names a file; diagnostics go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace massent::cli
