#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace lipwalk::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitSolver = 3,
  kExitIo = 4,
};

// Converged once the step-start error norm stays below this.
inline constexpr double kConvergenceTolerance = 1e-3;

/// Entry point for `lipwalk <subcommand> ...`; args excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace lipwalk::cli
