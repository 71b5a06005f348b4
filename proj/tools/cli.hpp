#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ladder::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kValidation = 2,
    kTool = 3,
    kNoOverlap = 4,
};

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "94.05%" style, two decimals.
std::string format_percent(double value);

}  // namespace ladder::cli
