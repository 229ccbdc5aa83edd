#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ohsent {

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitDataError = 1, kExitUsage = 2 };

/// Entry point of the `ohsent` tool. Arguments exclude the program name.
/// Environment variables OHSENT_<FLAG> (e.g. OHSENT_SEED) supply flags that
/// are not given on the command line.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ohsent
