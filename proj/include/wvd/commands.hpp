#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wvd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitCheckFailed = 4;

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code. Results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wvd
