#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ucfg {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitCapability = 3,
  kExitInternal = 4,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ucfg
