#pragma once

#include <iosfwd>

namespace monosplit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDivergence = 2;
inline constexpr int kExitOracle = 3;

/// Entry point of the `monosplit` tool. Results go to `out`, diagnostics and
/// logs to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace monosplit::cli
