#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "memstep/app/commands.hpp"
#include "memstep/errors.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

extern "C" void on_signal(int) { g_stop = 1; }

void add_run_options(CLI::App& cmd, memstep::app::FlagOverrides& f) {
  cmd.add_option("--config", f.config, "JSON config or manifest.json of a previous run");
  cmd.add_option("--beta", f.beta, "stretched-exponential exponent (3/7, 1/2 or 3/5 built in)");
  cmd.add_option("--kernel-file", f.kernel_file, "Prony coefficients as CSV rows a,b");
  cmd.add_option("--sigma", f.sigma, "scheme weight in (0, 1]");
  cmd.add_option("--tau", f.tau, "time step; T / tau must be whole");
  cmd.add_option("--steps", f.steps, "number of time steps");
  cmd.add_option("--T", f.final_time, "final time");
  cmd.add_option("--grid", f.grid, "cells per direction");
  cmd.add_option("--out", f.out, "run directory");
  cmd.add_option("--reference-steps", f.reference_steps, "steps of the sigma = 1/2 reference");
  cmd.add_option("--deterministic", f.deterministic, "byte-reproducible CSVs (true/false)");
  cmd.add_option("--ladder", f.ladder, "step counts of the convergence study")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  using namespace memstep::app;

  CLI::App app{"Volterra integrodifferential solver with sum-of-exponentials kernels"};
  app.set_version_flag("--version", MEMSTEP_VERSION);
  app.require_subcommand(1);

  FlagOverrides flags;
  CLI::App* run = app.add_subcommand("run", "integrate the model problem, write trajectory.csv");
  CLI::App* converge = app.add_subcommand("converge", "time-step ladder study against a fine reference");
  CLI::App* kernel = app.add_subcommand("kernel-error", "Prony minus analytic kernel on a log-spaced window");
  CLI::App* baseline = app.add_subcommand("compare-baseline", "compressed scheme against full-history quadrature");
  for (CLI::App* cmd : {run, converge, kernel, baseline}) add_run_options(*cmd, flags);
  kernel->add_flag("--self", flags.self_compare, "compare the Prony series with itself");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  CommandContext ctx{std::cout, std::cerr};
  ctx.control.cancelled = [] { return g_stop != 0; };

  RunConfig config;
  try {
    if (flags.config) config = load_run_config(*flags.config);
    apply_overrides(config, flags);
  } catch (const memstep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return run_command(app.get_subcommands().front()->get_name(), config, ctx);
}
