#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rrmesh {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;    // usage, parse or validation failure
inline constexpr int kExitOptimizer = 2;  // optimizer failure; partial outputs are written

/// Runs the command line `args` (without the program name).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rrmesh
