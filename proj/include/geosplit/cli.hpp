#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geosplit {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation failure or module error
inline constexpr int kExitUsage = 2;    // bad flags, unreadable or malformed input

/// Runs one command line. `args` excludes the program name. Reports go to `out`
/// unless an output file is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace geosplit
