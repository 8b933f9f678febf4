#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace owbf::cli {

// Runs the command line `args` (args[0] is the program name). Reports go to
// `out`, diagnostics to `err`. Returns the process exit code: 0 on success,
// 1 for runtime errors, 2 for usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace owbf::cli
