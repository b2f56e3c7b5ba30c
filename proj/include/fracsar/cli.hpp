#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fracsar {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumeric = 4,
};

/// Entry point behind the `fracsar` executable. Subcommands: synth, filter,
/// estimate, rgbmap, train, detect, eval, lrd-check. Diagnostics go to `err`
/// as single lines; reports go to `out`.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracsar
