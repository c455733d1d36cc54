#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cyclocap::cli {

/// Exit codes of the command-line driver.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNumericalError = 3 };

/// Runs the driver on `args` (without the program name). Data goes to files
/// and `out`; progress and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cyclocap::cli
