#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace labeltree::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kDataError = 3,
  kInternalError = 4,
};

// Runs one subcommand. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "start:stop:step", both ends inclusive within 1e-9. Throws on bad syntax or
// values outside (0, 1).
std::vector<double> parse_threshold_range(const std::string& range);

}  // namespace labeltree::cli
