#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "ctmcfresh/error.hpp"

namespace ctmcfresh::cli {

/// Process exit codes: stable contract for scripting.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,       // bad arguments or unparsable config
  kValidation = 3,  // a domain invariant failed
  kIo = 4,
};

int exit_code_for(Errc code) noexcept;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace ctmcfresh::cli
