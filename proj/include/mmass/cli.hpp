#pragma once

#include <ostream>

namespace mmass::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitViolation = 3;
inline constexpr int kExitInternal = 1;

/// Parses argv and runs one subcommand. Results go to `out` (or --out),
/// diagnostics and usage to `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mmass::cli
