#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uavtp {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitBadConfig = 2,
    kExitUnwritableOutput = 3,
    kExitShapeMismatch = 4,
};

/// Entry point shared by the executable and the tests. args excludes the
/// program name, e.g. {"train", "--config", "run.cfg", "--out", "runs/a"}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uavtp
