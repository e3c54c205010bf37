#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tscatter::cli {

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitNoConvergence = 3;

/// Runs one command line (args excludes the program name). Reports go to
/// `out` (or the --output file), error objects to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tscatter::cli
