#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hps::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitComputation = 2;

/// Runs one subcommand. `args` excludes the program name. Reports go to the
/// requested files or to `out`; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hps::cli
