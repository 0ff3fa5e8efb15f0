#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace terank::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kDataError = 3,
  kNumericFailure = 4,
};

/// Runs `terank <args...>`; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace terank::cli
