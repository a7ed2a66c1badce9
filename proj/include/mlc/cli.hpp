#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mlc {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_verification_failed = 1,
  exit_invalid_input = 2,
  exit_infeasible = 3,
};

/// Runs one command. `args` excludes the program name.
/// Commands: synth, verify, complexity, census, count, linear, binary.
int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace mlc
