#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wolbopt::cli {

enum ExitCode { kOk = 0, kAssumption = 1, kInput = 2, kDivergence = 3 };

// Full command-line entry point; never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wolbopt::cli
