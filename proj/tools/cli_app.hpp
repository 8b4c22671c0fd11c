#pragma once

#include <iosfwd>

namespace imatch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitUnstable = 2;

// Full command-line driver. Results go to out (or --out files), diagnostics
// to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace imatch::cli
