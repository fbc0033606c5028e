#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "trollmap/error.hpp"

namespace trollmap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

// A stage input is missing: an input file, or the output of an earlier stage.
class DependencyError : public Error {
 public:
  using Error::Error;
};

// Runs the command line `args` (without the program name). Diagnostics go to
// `err`, progress summaries to `out`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trollmap::cli
