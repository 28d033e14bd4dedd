#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gatefi {

// Exit status contract of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitDomain = 1,  // parse, validation, configuration or simulation error
  kExitIo = 2,      // unreadable or unwritable files, bad command-line usage
};

// Runs one subcommand (check, instrument, collapse, run, report). `args`
// excludes the program name. Results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gatefi
