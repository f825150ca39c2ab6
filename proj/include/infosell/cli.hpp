#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace infosell::cli {

// Runs one CLI invocation. Exit codes: 0 success, 1 usage error, 2 input
// validation failure, 3 solver or certification error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infosell::cli
