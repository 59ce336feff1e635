#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shuffle_levels::cli {

// Runs one invocation. args[0] is the program name. Returns the exit code:
// 0 success, 1 domain error, 2 usage error. Diagnostics go to err only.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shuffle_levels::cli
