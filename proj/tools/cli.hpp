#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace chase::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInfeasible = 3 };

struct CommandOutcome {
  int exit_code = kOk;
  std::vector<std::filesystem::path> files;  // written, in order
};

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Errors produce exactly one line on `err`:
//   error code=<n> kind=<usage|data|infeasible> message="<text>"
CommandOutcome run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chase::cli
