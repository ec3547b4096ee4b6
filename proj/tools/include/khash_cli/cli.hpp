#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace khash::cli {

/// Process exit statuses.
enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kNumeric = 2,
  kBudget = 3,
};

/// Runs one command line (without the program name). Reports go to `out`
/// (or to --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace khash::cli
