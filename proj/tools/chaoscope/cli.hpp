#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chaoscope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitEstimator = 2;

/// Runs the chaoscope command line. args[0] is the program name. Reports go
/// to `out` (or --out), diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "2,3", "2..43", "1..3,7" -> expanded, in order of appearance.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace chaoscope::cli
