#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qfs::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitDivergence = 3,
    kExitAliasing = 4,
    kExitMissingInput = 5,
};

constexpr int kResultFormatVersion = 1;

/// Runs one command. `args` excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

} // namespace qfs::cli
