#include "memstep/app/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "memstep/errors.hpp"
#include "memstep/io.hpp"

#ifndef MEMSTEP_VERSION
#define MEMSTEP_VERSION "unknown"
#endif

namespace memstep::app {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPartialMarker = ".partial";

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string slope_text(const std::optional<double>& slope) {
  return slope ? format_double(*slope, 4) : std::string("n/a");
}

// Owns the run directory: creates it with a partial marker, writes the
// manifest and drops the marker only when the command completes.
class RunDirectory {
 public:
  RunDirectory(const RunConfig& config, std::string command)
      : config_(config), command_(std::move(command)), path_(output_directory(config, command_)),
        started_(utc_now()) {
    std::error_code ec;
    fs::create_directories(path_, ec);
    if (ec) throw ConfigError("output.dir", "cannot create " + path_.string() + ": " + ec.message());
    std::ofstream(path_ / kPartialMarker) << command_ << " started " << started_ << "\n";
  }

  const fs::path& path() const { return path_; }

  fs::path output(const std::string& name) {
    outputs_.push_back(name);
    return path_ / name;
  }

  void complete() {
    nlohmann::ordered_json manifest;
    manifest["format"] = "memstep-manifest/1";
    manifest["command"] = command_;
    manifest["code_version"] = MEMSTEP_VERSION;
    manifest["started_utc"] = started_;
    manifest["finished_utc"] = utc_now();
    manifest["config"] = to_json(config_);
    manifest["outputs"] = outputs_;
    std::ofstream(path_ / "manifest.json", std::ios::binary) << manifest.dump(2) << "\n";
    fs::remove(path_ / kPartialMarker);
  }

 private:
  RunConfig config_;
  std::string command_;
  fs::path path_;
  std::string started_;
  std::vector<std::string> outputs_;
};

}  // namespace

int cmd_run(const RunConfig& config, CommandContext& ctx) {
  const ExperimentSpec spec = to_experiment(config);
  RunDirectory dir(config, "run");

  const Trajectory trajectory = run_model_problem(spec, ctx.control);
  {
    auto out = open_csv(dir.output("trajectory.csv"));
    write_trajectory_csv(out, trajectory.rows);
  }
  if (config.checkpoint) {
    dir.output("checkpoint");
    write_checkpoint(dir.path() / "checkpoint", trajectory.final_state);
  }
  if (trajectory.accuracy_warning)
    ctx.err << "warning: (1 - sigma) b tau > 1 for some Prony term; the step is stable but may be inaccurate\n";

  const auto& last = trajectory.rows.back();
  ctx.out << "steps " << last.step << ", t = " << format_double(last.time, 6)
          << ", energy = " << format_double(last.energy, 8)
          << ", center value = " << format_double(last.center_value, 8) << "\n";
  ctx.out << "run directory: " << dir.path().string() << "\n";
  dir.complete();
  return kSuccess;
}

int cmd_converge(const RunConfig& config, CommandContext& ctx) {
  const ExperimentSpec spec = to_experiment(config);
  RunDirectory dir(config, "converge");

  const ConvergenceTable table = convergence_study(spec, config.sigma, ctx.control);
  {
    auto out = open_csv(dir.output("convergence.csv"));
    write_convergence_csv(out, table);
  }
  {
    auto out = open_csv(dir.output("errors.csv"));
    write_errors_csv(out, table.rows.back().errors);
  }
  for (const auto& row : table.rows) {
    auto out = open_csv(dir.output("errors_n" + std::to_string(row.steps) + ".csv"));
    write_errors_csv(out, row.errors);
  }

  ctx.out << "sigma = " << format_double(table.sigma, 6) << "\n";
  ctx.out << "tau,max_eps2,max_epsinf\n";
  for (const auto& row : table.rows)
    ctx.out << format_double(row.tau, 6) << "," << format_double(row.max_eps2, 6) << ","
            << format_double(row.max_epsinf, 6) << "\n";
  ctx.out << "slope eps2 = " << slope_text(table.slope_eps2) << "\n";
  ctx.out << "slope epsinf = " << slope_text(table.slope_epsinf) << "\n";
  dir.complete();
  return kSuccess;
}

int cmd_kernel_error(const RunConfig& config, CommandContext& ctx) {
  const PronySeries prony = select_kernel(config);
  const TimeWindow window{config.kernel_error_t_min, config.kernel_error_t_max};

  KernelErrorReport report;
  if (config.kernel_error_self) {
    report = kernel_error(prony, prony, window, config.kernel_error_samples);
  } else {
    if (!config.beta || !(*config.beta > 0.0 && *config.beta < 1.0))
      throw ConfigError("kernel.beta", "the analytic reference needs beta in (0, 1)");
    report = kernel_sup_error(AnalyticKernel::stretched(*config.beta), prony, window, config.kernel_error_samples);
  }

  RunDirectory dir(config, "kernel-error");
  {
    auto out = open_csv(dir.output("kernel_error.csv"));
    write_kernel_error_csv(out, report);
  }
  ctx.out << "sup error = " << format_double(report.sup_norm) << "\n";
  dir.complete();
  return kSuccess;
}

int cmd_compare_baseline(const RunConfig& config, CommandContext& ctx) {
  constexpr int kMaxGrid = 32;
  if (config.grid_n > kMaxGrid)
    throw ConfigError("grid.n", "full-history comparison is limited to grids of at most " +
                                    std::to_string(kMaxGrid) + " cells per direction");
  const ExperimentSpec spec = to_experiment(config);
  RunDirectory dir(config, "compare-baseline");

  std::optional<Snapshots> reference;
  if (config.reference_steps > 0) {
    std::vector<int> counts = spec.ladder;
    counts.push_back(spec.reference_steps);
    reference = compute_reference(spec, shared_sample_count(counts), ctx.control);
  }
  const BaselineTable table = compare_baseline(spec, reference ? &*reference : nullptr, ctx.control);
  {
    auto out = open_csv(dir.output("baseline.csv"));
    write_baseline_csv(out, table, !config.deterministic);
  }

  ctx.out << "steps,max_difference,soe_error,soe_fields,history_fields,soe_seconds,history_seconds\n";
  for (const auto& row : table.rows) {
    ctx.out << row.steps << "," << format_double(row.max_difference, 6) << ","
            << (row.soe_error ? format_double(*row.soe_error, 6) : std::string("n/a")) << "," << row.soe_fields
            << "," << row.history_fields << "," << format_double(row.soe_seconds, 4) << ","
            << format_double(row.history_seconds, 4) << "\n";
  }
  ctx.out << "difference order = " << slope_text(table.slope) << "\n";
  dir.complete();
  return kSuccess;
}

int run_command(const std::string& name, const RunConfig& raw, CommandContext& ctx) {
  try {
    const RunConfig config = resolve(raw);
    if (name == "run") return cmd_run(config, ctx);
    if (name == "converge") return cmd_converge(config, ctx);
    if (name == "kernel-error") return cmd_kernel_error(config, ctx);
    if (name == "compare-baseline") return cmd_compare_baseline(config, ctx);
    ctx.err << "error: unknown command '" << name << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    ctx.err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const AlignmentError& e) {
    ctx.err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Cancelled&) {
    ctx.err << "interrupted; partial results left in place\n";
    return kInterrupted;
  } catch (const ConvergenceError& e) {
    ctx.err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const NotSpdError& e) {
    ctx.err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace memstep::app
