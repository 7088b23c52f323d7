#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fraxion {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitInfeasible = 2,
    kExitVerifyFailed = 3,
};

/// Runs one command (solve, sweep, verify, bed) and returns the exit
/// code. `args` excludes the program name. The FRAXION_N_CAP environment
/// variable overrides the fraction-count cap.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fraxion
