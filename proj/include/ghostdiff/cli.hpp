#pragma once

#include <ostream>

namespace ghostdiff::cli {

/// Entry point of the `ghostdiff` tool. Writes the JSON summary to `out` and
/// the human table and diagnostics to `err`. Returns the process exit code:
/// 0 success, 2 invalid input, 3 numerical non-convergence, 4 I/O failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ghostdiff::cli
