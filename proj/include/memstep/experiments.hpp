#pragma once

// The relaxation model problem on the unit square: reference solutions,
// error series, convergence studies and the full-history comparison.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "memstep/cg.hpp"
#include "memstep/grid.hpp"
#include "memstep/kernels.hpp"
#include "memstep/schemes.hpp"

namespace memstep {

/// u0(x) = x1 x2 sin(pi x1) sin(pi x2).
double model_initial_condition(double x1, double x2);

struct ExperimentSpec {
  PronySeries kernel = load_builtin_prony(0.5);
  int grid_n = 32;             // N1 = N2
  double final_time = 1.0;     // T
  double sigma = 0.5;
  int steps = 400;             // single-run step count, tau = T / steps
  std::vector<int> ladder{50, 100, 200, 400};  // step counts of a convergence study
  int reference_steps = 1000;  // sigma = 1/2 reference
  CgOptions solver{};
  ForcingEvaluation forcing = ForcingEvaluation::Point;
  PointFunction initial_condition = model_initial_condition;
  bool verify_auxiliary = false;  // evaluate the auxiliary residual after every step
  bool parallel = false;          // run ladder levels concurrently

  /// Throws ConfigError naming the field.
  void validate() const;
  SchemeConfig scheme(double sigma_value, int step_count) const;
};

/// A = five-point Laplacian on the spec grid, B = I, C absent, phi = 0.
ProblemSpec model_problem(const ExperimentSpec& spec);

/// Greatest common divisor of the step counts: the number of sample times
/// t_k = k T / count, k = 1..count, that every grid hits exactly.
int shared_sample_count(std::span<const int> step_counts);

struct TrajectoryRow {
  long step;
  double time;
  double energy;
  double center_value;  // y at the node nearest (0.5, 0.5)
};

struct Snapshots {
  std::vector<double> times;
  std::vector<GridFunction> fields;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;  // includes step 0
  Snapshots snapshots;
  SoeState final_state;
  double max_aux_residual = 0.0;  // zero unless spec.verify_auxiliary
  bool accuracy_warning = false;
};

struct RunControl {
  std::function<bool()> cancelled;  // polled once per step; throws Cancelled when true
};

/// Runs the model problem with the compressed scheme for `steps` steps,
/// keeping `sample_count` evenly spaced snapshots in (0, T] (none when 0).
/// Throws AlignmentError when sample_count does not divide steps.
Trajectory run_model_problem(const ExperimentSpec& spec, double sigma, int steps, int sample_count,
                             const RunControl& control = {});

/// spec.sigma and spec.steps, no snapshots.
Trajectory run_model_problem(const ExperimentSpec& spec, const RunControl& control = {});

/// sigma = 1/2 run with spec.reference_steps steps, snapshots at the shared
/// sample times of the ladder. Requires reference_steps >= 10 x the coarsest
/// ladder step count.
Snapshots compute_reference(const ExperimentSpec& spec, int sample_count, const RunControl& control = {});

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> eps2;    // L2(omega) norm of the difference
  std::vector<double> epsinf;  // max nodal difference
};

/// Throws AlignmentError unless both carry the same sample times and DimensionError on grid mismatch.
ErrorSeries error_series(const Snapshots& coarse, const Snapshots& reference);

/// Least-squares slope of log(y) against log(x); nullopt when fewer than two
/// points or any y is not strictly positive.
std::optional<double> fit_slope(std::span<const double> x, std::span<const double> y);

struct ConvergenceRow {
  int steps;
  double tau;
  double max_eps2;
  double max_epsinf;
  ErrorSeries errors;
};

struct ConvergenceTable {
  double sigma;
  std::vector<ConvergenceRow> rows;
  std::optional<double> slope_eps2;
  std::optional<double> slope_epsinf;
  double max_aux_residual = 0.0;
};

/// Runs every ladder level with weight `sigma` and measures it against `reference`.
ConvergenceTable convergence_study(const ExperimentSpec& spec, double sigma, const Snapshots& reference,
                                   const RunControl& control = {});
/// Computes the reference first.
ConvergenceTable convergence_study(const ExperimentSpec& spec, double sigma, const RunControl& control = {});

struct BaselineRow {
  int steps;
  double tau;
  double max_difference;             // max over steps and nodes of |y_soe - y_history|
  std::optional<double> soe_error;   // max eps_inf of the compressed run against the reference
  std::size_t soe_fields;            // m + 1
  std::size_t history_fields;        // n + 1 at the final step
  double soe_seconds;
  double history_seconds;
};

struct BaselineTable {
  std::vector<BaselineRow> rows;
  std::optional<double> slope;
  double max_aux_residual = 0.0;
};

/// Steps the compressed scheme and the full-history baseline side by side on every ladder level.
BaselineTable compare_baseline(const ExperimentSpec& spec, const Snapshots* reference = nullptr,
                               const RunControl& control = {});

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRow> rows);
void write_errors_csv(std::ostream& out, const ErrorSeries& errors);
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);
void write_kernel_error_csv(std::ostream& out, const KernelErrorReport& report);
/// Timing columns are left out when `with_timing` is false so the file is reproducible.
void write_baseline_csv(std::ostream& out, const BaselineTable& table, bool with_timing);

}  // namespace memstep
