#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace infine {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitIo = 3,
  kExitInput = 4,
  kExitInternal = 5,
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infine
