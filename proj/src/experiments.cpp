#include "memstep/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "memstep/errors.hpp"
#include "memstep/io.hpp"

namespace memstep {

double model_initial_condition(double x1, double x2) {
  return x1 * x2 * std::sin(std::numbers::pi * x1) * std::sin(std::numbers::pi * x2);
}

void ExperimentSpec::validate() const {
  if (grid_n < 2) throw ConfigError("grid.n", "need at least 2 cells per direction");
  if (!(final_time > 0.0) || !std::isfinite(final_time)) throw ConfigError("experiment.T", "final time must be > 0");
  if (!(sigma > 0.0 && sigma <= 1.0)) {
    std::ostringstream msg;
    msg << "sigma must be in (0,1], got " << sigma;
    throw ConfigError("scheme.sigma", msg.str());
  }
  if (steps < 1) throw ConfigError("scheme.steps", "need at least one step");
  for (int n : ladder)
    if (n < 1) throw ConfigError("study.ladder", "step counts must be >= 1");
  if (reference_steps < 1) throw ConfigError("reference.steps", "need at least one step");
  if (!(solver.tolerance > 0.0)) throw ConfigError("solver.tol", "tolerance must be > 0");
  if (solver.max_iterations < 0) throw ConfigError("solver.max_iter", "must be >= 0 (0 selects the default)");
}

SchemeConfig ExperimentSpec::scheme(double sigma_value, int step_count) const {
  SchemeConfig config;
  config.sigma = sigma_value;
  config.tau = final_time / step_count;
  config.n_steps = step_count;
  config.solver = solver;
  config.forcing = forcing;
  config.validate();
  return config;
}

ProblemSpec model_problem(const ExperimentSpec& spec) {
  const Grid2D grid(spec.grid_n);
  return ProblemSpec{.A = std::make_shared<FivePointLaplacian>(grid),
                     .B = nullptr,
                     .C = nullptr,
                     .kernel = spec.kernel,
                     .forcing = {},
                     .u0 = sample_function(grid, spec.initial_condition)};
}

int shared_sample_count(std::span<const int> step_counts) {
  int g = 0;
  for (int n : step_counts) g = std::gcd(g, n);
  return g;
}

namespace {

void poll(const RunControl& control) {
  if (control.cancelled && control.cancelled()) throw Cancelled();
}

double sample_time(double final_time, int k, int count) { return final_time * k / count; }

void require_alignment(int steps, int sample_count) {
  if (sample_count < 0 || (sample_count > 0 && steps % sample_count != 0)) {
    std::ostringstream msg;
    msg << sample_count << " sample times do not lie on a grid of " << steps << " steps";
    throw AlignmentError(msg.str());
  }
}

}  // namespace

Trajectory run_model_problem(const ExperimentSpec& spec, double sigma, int steps, int sample_count,
                             const RunControl& control) {
  spec.validate();
  require_alignment(steps, sample_count);
  const ProblemSpec problem = model_problem(spec);
  const SchemeConfig config = spec.scheme(sigma, steps);
  const std::size_t center = center_index(problem.u0.grid());

  SoeState state = soe_init(problem);
  Trajectory result{{}, {}, state, 0.0, accuracy_warning(problem.kernel, config)};
  result.rows.reserve(static_cast<std::size_t>(steps) + 1);
  result.rows.push_back({0, 0.0, energy(problem, state), state.y[center]});
  const int stride = sample_count > 0 ? steps / sample_count : 0;
  for (int n = 0; n < steps; ++n) {
    poll(control);
    SoeState next = soe_step(problem, config, state);
    if (spec.verify_auxiliary)
      result.max_aux_residual = std::max(result.max_aux_residual, auxiliary_residual(problem.kernel, config, state, next));
    state = std::move(next);
    result.rows.push_back({state.step, state.time, energy(problem, state), state.y[center]});
    if (stride > 0 && (n + 1) % stride == 0) {
      result.snapshots.times.push_back(sample_time(spec.final_time, (n + 1) / stride, sample_count));
      result.snapshots.fields.push_back(state.y);
    }
  }
  result.final_state = std::move(state);
  return result;
}

Trajectory run_model_problem(const ExperimentSpec& spec, const RunControl& control) {
  return run_model_problem(spec, spec.sigma, spec.steps, 0, control);
}

Snapshots compute_reference(const ExperimentSpec& spec, int sample_count, const RunControl& control) {
  spec.validate();
  if (!spec.ladder.empty()) {
    const int coarsest = *std::min_element(spec.ladder.begin(), spec.ladder.end());
    if (spec.reference_steps < 10 * coarsest) {
      std::ostringstream msg;
      msg << "reference needs at least " << 10 * coarsest << " steps (10x the coarsest study level), got "
          << spec.reference_steps;
      throw ConfigError("reference.steps", msg.str());
    }
  }
  if (sample_count < 1) throw AlignmentError("reference needs at least one sample time");
  require_alignment(spec.reference_steps, sample_count);
  return run_model_problem(spec, 0.5, spec.reference_steps, sample_count, control).snapshots;
}

ErrorSeries error_series(const Snapshots& coarse, const Snapshots& reference) {
  if (coarse.times.size() != reference.times.size() || coarse.fields.size() != coarse.times.size() ||
      reference.fields.size() != reference.times.size())
    throw AlignmentError("trajectory and reference carry different sample counts");
  ErrorSeries errors;
  for (std::size_t k = 0; k < coarse.times.size(); ++k) {
    const double t = reference.times[k];
    if (std::abs(coarse.times[k] - t) > 1e-12 * std::max(1.0, std::abs(t))) {
      std::ostringstream msg;
      msg << "sample " << k << " at t = " << coarse.times[k] << " does not match reference time " << t;
      throw AlignmentError(msg.str());
    }
    const GridFunction diff = coarse.fields[k] - reference.fields[k];
    errors.times.push_back(t);
    errors.eps2.push_back(l2_norm(diff));
    errors.epsinf.push_back(max_abs(diff));
  }
  return errors;
}

std::optional<double> fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0) || !std::isfinite(y[k])) return std::nullopt;
    mx += std::log(x[k]) / n;
    my += std::log(y[k]) / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

namespace {

void require_study_ladder(const ExperimentSpec& spec) {
  if (spec.ladder.size() < 3) throw ConfigError("study.ladder", "a convergence study needs at least 3 step counts");
  for (std::size_t k = 1; k < spec.ladder.size(); ++k) {
    if (spec.ladder[k] != 2 * spec.ladder[k - 1])
      throw ConfigError("study.ladder", "each level must halve the previous time step");
  }
}

template <class Job>
auto run_levels(const ExperimentSpec& spec, Job job) {
  using Result = decltype(job(0));
  std::vector<Result> results;
  if (spec.parallel) {
    std::vector<std::future<Result>> pending;
    for (int steps : spec.ladder) pending.push_back(std::async(std::launch::async, job, steps));
    for (auto& f : pending) results.push_back(f.get());
  } else {
    for (int steps : spec.ladder) results.push_back(job(steps));
  }
  return results;
}

}  // namespace

ConvergenceTable convergence_study(const ExperimentSpec& spec, double sigma, const Snapshots& reference,
                                   const RunControl& control) {
  spec.validate();
  require_study_ladder(spec);
  const int sample_count = static_cast<int>(reference.times.size());
  for (int steps : spec.ladder) require_alignment(steps, sample_count);

  const auto runs = run_levels(spec, [&](int steps) {
    return run_model_problem(spec, sigma, steps, sample_count, control);
  });

  ConvergenceTable table{sigma, {}, std::nullopt, std::nullopt, 0.0};
  std::vector<double> taus;
  std::vector<double> e2;
  std::vector<double> einf;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    ErrorSeries errors = error_series(runs[k].snapshots, reference);
    const double max2 = errors.eps2.empty() ? 0.0 : *std::max_element(errors.eps2.begin(), errors.eps2.end());
    const double maxinf =
        errors.epsinf.empty() ? 0.0 : *std::max_element(errors.epsinf.begin(), errors.epsinf.end());
    const double tau = spec.final_time / spec.ladder[k];
    table.rows.push_back({spec.ladder[k], tau, max2, maxinf, std::move(errors)});
    table.max_aux_residual = std::max(table.max_aux_residual, runs[k].max_aux_residual);
    taus.push_back(tau);
    e2.push_back(max2);
    einf.push_back(maxinf);
  }
  table.slope_eps2 = fit_slope(taus, e2);
  table.slope_epsinf = fit_slope(taus, einf);
  return table;
}

ConvergenceTable convergence_study(const ExperimentSpec& spec, double sigma, const RunControl& control) {
  spec.validate();
  require_study_ladder(spec);
  std::vector<int> counts = spec.ladder;
  counts.push_back(spec.reference_steps);
  const Snapshots reference = compute_reference(spec, shared_sample_count(counts), control);
  return convergence_study(spec, sigma, reference, control);
}

BaselineTable compare_baseline(const ExperimentSpec& spec, const Snapshots* reference, const RunControl& control) {
  spec.validate();
  if (spec.ladder.empty()) throw ConfigError("study.ladder", "baseline comparison needs at least one step count");
  const int sample_count = reference ? static_cast<int>(reference->times.size()) : 0;
  if (reference)
    for (int steps : spec.ladder) require_alignment(steps, sample_count);
  const ProblemSpec problem = model_problem(spec);

  const auto rows = run_levels(spec, [&](int steps) {
    using clock = std::chrono::steady_clock;
    const SchemeConfig config = spec.scheme(spec.sigma, steps);
    SoeState soe = soe_init(problem);
    HistoryState history = history_init(problem);
    BaselineRow row{steps, config.tau, 0.0, std::nullopt, soe.aux.size() + 1, 1, 0.0, 0.0};
    Snapshots snapshots;
    double aux_residual = 0.0;
    const int stride = sample_count > 0 ? steps / sample_count : 0;
    for (int n = 0; n < steps; ++n) {
      poll(control);
      const auto t0 = clock::now();
      SoeState next = soe_step(problem, config, soe);
      const auto t1 = clock::now();
      history = quadrature_step(problem, config, history);
      const auto t2 = clock::now();
      row.soe_seconds += std::chrono::duration<double>(t1 - t0).count();
      row.history_seconds += std::chrono::duration<double>(t2 - t1).count();
      if (spec.verify_auxiliary)
        aux_residual = std::max(aux_residual, auxiliary_residual(problem.kernel, config, soe, next));
      soe = std::move(next);
      row.max_difference = std::max(row.max_difference, max_abs(soe.y - history.levels.back()));
      if (stride > 0 && (n + 1) % stride == 0) {
        snapshots.times.push_back(sample_time(spec.final_time, (n + 1) / stride, sample_count));
        snapshots.fields.push_back(soe.y);
      }
    }
    row.history_fields = history.levels.size();
    if (reference) {
      const ErrorSeries errors = error_series(snapshots, *reference);
      row.soe_error = *std::max_element(errors.epsinf.begin(), errors.epsinf.end());
    }
    return std::pair{row, aux_residual};
  });

  BaselineTable table;
  std::vector<double> taus;
  std::vector<double> diffs;
  for (const auto& [row, aux] : rows) {
    table.rows.push_back(row);
    table.max_aux_residual = std::max(table.max_aux_residual, aux);
    taus.push_back(row.tau);
    diffs.push_back(row.max_difference);
  }
  if (rows.size() >= 2) table.slope = fit_slope(taus, diffs);
  return table;
}

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRow> rows) {
  out << "n,t,energy,center_value\n";
  for (const auto& row : rows)
    out << row.step << ',' << format_double(row.time) << ',' << format_double(row.energy) << ','
        << format_double(row.center_value) << '\n';
}

void write_errors_csv(std::ostream& out, const ErrorSeries& errors) {
  out << "t,eps2,epsinf\n";
  for (std::size_t k = 0; k < errors.times.size(); ++k)
    out << format_double(errors.times[k]) << ',' << format_double(errors.eps2[k]) << ','
        << format_double(errors.epsinf[k]) << '\n';
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "tau,max_eps2,max_epsinf\n";
  for (const auto& row : table.rows)
    out << format_double(row.tau) << ',' << format_double(row.max_eps2) << ',' << format_double(row.max_epsinf)
        << '\n';
}

void write_kernel_error_csv(std::ostream& out, const KernelErrorReport& report) {
  out << "t,error\n";
  for (std::size_t k = 0; k < report.times.size(); ++k)
    out << format_double(report.times[k]) << ',' << format_double(report.errors[k]) << '\n';
}

void write_baseline_csv(std::ostream& out, const BaselineTable& table, bool with_timing) {
  out << "steps,tau,max_difference,soe_error,soe_fields,history_fields";
  if (with_timing) out << ",soe_seconds,history_seconds";
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.steps << ',' << format_double(row.tau) << ',' << format_double(row.max_difference) << ','
        << (row.soe_error ? format_double(*row.soe_error) : std::string()) << ',' << row.soe_fields << ','
        << row.history_fields;
    if (with_timing) out << ',' << format_double(row.soe_seconds, 6) << ',' << format_double(row.history_seconds, 6);
    out << '\n';
  }
}

}  // namespace memstep
