#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace perc {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNotFull = 3 };

/// Runs one command line (without the program name). Tables go to `out` unless --out
/// names a file; diagnostics go to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace perc
