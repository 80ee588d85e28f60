#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace loadbal::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kBadInput = 2;
inline constexpr int kInternal = 3;

// Runs one CLI invocation. `args` excludes the program name. Results go to
// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace loadbal::cli
