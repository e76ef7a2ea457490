#pragma once

#include <iosfwd>

namespace rnf {

/// Exit codes of the command line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_input = 1,
  exit_model = 2,
  exit_hypothesis = 3,
  exit_internal = 4,
};

/// Runs `rnf <command> ...` with human output on `out` and diagnostics on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rnf
