#pragma once

#include <iosfwd>
#include <ostream>
#include <string>
#include <vector>

namespace bregaccel::cli {

enum ExitCode : int {
  kExitConverged = 0,
  kExitUsage = 1,
  kExitNotConverged = 2,
  kExitNumerical = 3,
};

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bregaccel::cli
