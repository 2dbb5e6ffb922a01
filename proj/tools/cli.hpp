#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace barnes::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitBudget = 3;

/// Runs one command. `args` excludes the program name. Results go to `out`
/// (or the --out file), diagnostics to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace barnes::cli
