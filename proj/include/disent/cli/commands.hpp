#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace disent::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitVerdict = 3,
};

/// Runs one `disent` subcommand. `args` excludes the program name. CSV goes
/// to `out` (or to --out), report lines starting with "# " go to `out`, and
/// diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace disent::cli
