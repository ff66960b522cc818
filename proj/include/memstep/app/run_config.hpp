#pragma once

// Declarative run configuration: a flat JSON document with dotted keys,
// overlaid by command-line flags. Every field has a default.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "memstep/experiments.hpp"

namespace memstep::app {

struct RunConfig {
  std::optional<double> beta = 0.5;  // kernel.beta
  std::string kernel_file;           // kernel.file
  int grid_n = 32;                   // grid.n
  double final_time = 1.0;           // experiment.T
  double sigma = 0.5;                // scheme.sigma
  int steps = 400;                   // scheme.steps
  std::optional<double> tau;         // scheme.tau; when set, steps = T / tau
  bool steps_given = false;          // scheme.steps was set explicitly alongside scheme.tau
  std::vector<int> ladder{50, 100, 200, 400};  // study.ladder
  int reference_steps = 1000;        // reference.steps
  double solver_tol = 1e-10;         // solver.tol
  int solver_max_iter = 0;           // solver.max_iter
  bool solver_jacobi = false;        // solver.jacobi
  std::string forcing = "point";     // forcing.evaluation: point | blend
  double kernel_error_t_min = 0.1;   // kernel_error.t_min
  double kernel_error_t_max = 10.0;  // kernel_error.t_max
  int kernel_error_samples = 1000;   // kernel_error.samples
  bool kernel_error_self = false;    // kernel_error.self: compare the series with itself
  std::string output_dir;            // output.dir; empty selects $MEMSTEP_OUT/<command>
  bool checkpoint = true;            // output.checkpoint
  bool deterministic = true;         // deterministic
};

/// Command-line values; set fields override the file.
struct FlagOverrides {
  std::optional<std::string> config;
  std::optional<double> beta;
  std::optional<std::string> kernel_file;
  std::optional<double> sigma;
  std::optional<double> tau;
  std::optional<int> steps;
  std::optional<double> final_time;
  std::optional<int> grid;
  std::optional<std::string> out;
  std::optional<int> reference_steps;
  std::optional<bool> deterministic;
  std::optional<std::vector<int>> ladder;
  std::optional<bool> self_compare;
};

/// Reads a flat config document or a manifest.json written by a previous run.
/// Unknown keys and ill-typed values raise ConfigError naming the key.
RunConfig parse_run_config(const nlohmann::json& document);
RunConfig load_run_config(const std::filesystem::path& path);

void apply_overrides(RunConfig& config, const FlagOverrides& flags);

/// Fills derived fields (steps from tau, tau from steps) and validates
/// ranges. Throws ConfigError naming the field.
RunConfig resolve(RunConfig config);

/// Resolved config as the flat document parse_run_config accepts.
nlohmann::ordered_json to_json(const RunConfig& config);

/// The kernel selected by kernel.file or kernel.beta.
PronySeries select_kernel(const RunConfig& config);

ExperimentSpec to_experiment(const RunConfig& config);

/// output.dir, or $MEMSTEP_OUT (default ".") joined with "memstep-<command>".
std::filesystem::path output_directory(const RunConfig& config, const std::string& command);

}  // namespace memstep::app
