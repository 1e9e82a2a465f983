#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rcsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitVerify = 3;

/// Runs the command line `args` (args[0] is the program name). Artifacts go
/// to the files named by flags or to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rcsim
