#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace miniproof {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,  // a Failed verdict or a violated expectation
  kExitError = 2,   // an Error verdict
  kExitUsage = 3,   // usage, parse or semantic error
};

// Command-line driver. `args` excludes the program name. Reports go to
// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace miniproof
