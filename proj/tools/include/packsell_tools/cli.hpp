#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace packsell::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // runtime error: I/O, parse, codec, ...
  kUsage = 2,    // bad flags
  kNotConverged = 3,
};

/// Runs the tool with `args` (without the program name). Reports go to
/// `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace packsell::cli
