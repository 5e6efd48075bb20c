#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ibq::cli {

enum ExitCode : int {
  kOk = 0,
  kNegative = 1,
  kInadmissible = 2,
  kUnknown = 3,
  kUsage = 64,
  kParse = 65,
  kInternal = 70,
};

// Runs one `ibq` invocation. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ibq::cli
