#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lambda_lab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;  // size windows, retries, failed cross-checks

/// Runs one subcommand (build, estimate, sweep, oracle, experiment, diagnose).
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lambda_lab::cli
