#pragma once

#include <iosfwd>
#include <string>

#include "memstep/app/run_config.hpp"

namespace memstep::app {

enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
  kInterrupted = 130,
};

struct CommandContext {
  std::ostream& out;
  std::ostream& err;
  RunControl control{};
};

/// Model problem run: trajectory.csv, checkpoint/, manifest.json.
int cmd_run(const RunConfig& config, CommandContext& context);
/// Ladder study against a sigma = 1/2 reference: convergence.csv, errors*.csv.
int cmd_converge(const RunConfig& config, CommandContext& context);
/// Pointwise Prony-minus-analytic kernel error: kernel_error.csv.
int cmd_kernel_error(const RunConfig& config, CommandContext& context);
/// Compressed scheme against the full-history stepper: baseline.csv.
int cmd_compare_baseline(const RunConfig& config, CommandContext& context);

/// Resolves the config, dispatches by name and maps failures to exit codes:
/// 2 for configuration errors, 3 for numerical failures, 130 when cancelled.
int run_command(const std::string& name, const RunConfig& config, CommandContext& context);

}  // namespace memstep::app
