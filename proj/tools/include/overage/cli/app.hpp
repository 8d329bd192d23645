#pragma once

#include <iosfwd>

namespace overage::cli {

enum ExitCode : int { kSuccess = 0, kInputError = 2, kDomainError = 3, kConvergenceError = 4 };

/// Entry point of the `overage` tool; CSV and diagnostics go to `out` and `err`.
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace overage::cli
