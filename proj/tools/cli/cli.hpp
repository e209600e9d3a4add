#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace singlet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictMismatch = 1;
inline constexpr int kExitUsage = 2;

/// Runs `singletlab <subcommand> ...` with args excluding the program name.
/// Reports go to --out when given, else to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace singlet::cli
