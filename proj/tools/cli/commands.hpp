#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace g2tr::cli {

enum ExitCode : int { kSuccess = 0, kInternalError = 1, kInputError = 2 };

// Entry point of the `g2tr` tool. args excludes the program name.
// Subcommands: reduce, cost, compare.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace g2tr::cli
