#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psde::cli {

/// Runs the command line `args` (without the program name). Reports go to
/// `out`, error JSON to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psde::cli
