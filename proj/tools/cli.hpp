#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kljn::cli {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitBadInput = 1,
    kExitInfeasible = 2,
    kExitAmbiguousLevels = 3,
};

/// Runs the command line `args` (args[0] is the program name), writing
/// human-readable output to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kljn::cli
