#include "memstep/app/run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "memstep/errors.hpp"

namespace memstep::app {

namespace {

using nlohmann::json;

constexpr const char* kManifestFormat = "memstep-manifest/1";

std::string type_name(const json& v) { return v.type_name(); }

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number, got " + type_name(v));
  return v.get<double>();
}

int get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError(key, "expected an integer, got " + type_name(v));
  const auto value = v.get<long long>();
  if (value < INT32_MIN || value > INT32_MAX) throw ConfigError(key, "integer out of range");
  return static_cast<int>(value);
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key, "expected true or false, got " + type_name(v));
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string, got " + type_name(v));
  return v.get<std::string>();
}

void read_key(RunConfig& c, const std::string& key, const json& v) {
  if (key == "kernel.beta") {
    c.beta = v.is_null() ? std::nullopt : std::optional<double>(get_number(v, key));
  } else if (key == "kernel.file") {
    c.kernel_file = v.is_null() ? std::string() : get_string(v, key);
  } else if (key == "grid.n") {
    c.grid_n = get_int(v, key);
  } else if (key == "experiment.T") {
    c.final_time = get_number(v, key);
  } else if (key == "scheme.sigma") {
    c.sigma = get_number(v, key);
  } else if (key == "scheme.steps") {
    c.steps = get_int(v, key);
    c.steps_given = true;
  } else if (key == "scheme.tau") {
    c.tau = v.is_null() ? std::nullopt : std::optional<double>(get_number(v, key));
  } else if (key == "study.ladder") {
    if (!v.is_array()) throw ConfigError(key, "expected an array of step counts");
    c.ladder.clear();
    for (const auto& e : v) c.ladder.push_back(get_int(e, key));
  } else if (key == "reference.steps") {
    c.reference_steps = get_int(v, key);
  } else if (key == "solver.tol") {
    c.solver_tol = get_number(v, key);
  } else if (key == "solver.max_iter") {
    c.solver_max_iter = get_int(v, key);
  } else if (key == "solver.jacobi") {
    c.solver_jacobi = get_bool(v, key);
  } else if (key == "forcing.evaluation") {
    c.forcing = get_string(v, key);
  } else if (key == "kernel_error.t_min") {
    c.kernel_error_t_min = get_number(v, key);
  } else if (key == "kernel_error.t_max") {
    c.kernel_error_t_max = get_number(v, key);
  } else if (key == "kernel_error.samples") {
    c.kernel_error_samples = get_int(v, key);
  } else if (key == "kernel_error.self") {
    c.kernel_error_self = get_bool(v, key);
  } else if (key == "output.dir") {
    c.output_dir = v.is_null() ? std::string() : get_string(v, key);
  } else if (key == "output.checkpoint") {
    c.checkpoint = get_bool(v, key);
  } else if (key == "deterministic") {
    c.deterministic = get_bool(v, key);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

}  // namespace

RunConfig parse_run_config(const json& document) {
  if (!document.is_object()) throw ConfigError("config", "expected a JSON object");

  // A manifest carries the resolved config under "config".
  const json* body = &document;
  if (auto it = document.find("format"); it != document.end()) {
    if (!it->is_string() || it->get<std::string>() != kManifestFormat)
      throw ConfigError("format", "unsupported document format");
    auto cfg = document.find("config");
    if (cfg == document.end() || !cfg->is_object()) throw ConfigError("config", "manifest has no config object");
    body = &*cfg;
  }

  RunConfig config;
  for (const auto& [key, value] : body->items()) read_key(config, key, value);
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  }
  return parse_run_config(document);
}

void apply_overrides(RunConfig& c, const FlagOverrides& f) {
  if (f.beta) c.beta = *f.beta;
  if (f.kernel_file) c.kernel_file = *f.kernel_file;
  if (f.sigma) c.sigma = *f.sigma;
  if (f.grid) c.grid_n = *f.grid;
  if (f.out) c.output_dir = *f.out;
  if (f.reference_steps) c.reference_steps = *f.reference_steps;
  if (f.deterministic) c.deterministic = *f.deterministic;
  if (f.ladder) c.ladder = *f.ladder;
  if (f.self_compare) c.kernel_error_self = *f.self_compare;
  if (f.final_time) c.final_time = *f.final_time;

  // A flag-level step size replaces whatever the file said about the time grid.
  if (f.tau || f.steps || f.final_time) {
    c.tau = f.tau;
    if (f.steps) c.steps = *f.steps;
    c.steps_given = f.steps.has_value();
  }
}

RunConfig resolve(RunConfig c) {
  if (!(c.final_time > 0.0) || !std::isfinite(c.final_time))
    throw ConfigError("experiment.T", "must be positive and finite");
  if (c.tau) {
    const double tau = *c.tau;
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("scheme.tau", "must be positive and finite");
    const double ratio = c.final_time / tau;
    const long long n = std::llround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
      throw ConfigError("scheme.tau", "T / tau = " + std::to_string(ratio) + " is not a whole number of steps");
    if (n > INT32_MAX) throw ConfigError("scheme.tau", "too many steps");
    if (c.steps_given && c.steps != n)
      throw ConfigError("scheme.steps", "disagrees with T / scheme.tau = " + std::to_string(n));
    c.steps = static_cast<int>(n);
  }
  if (c.steps < 1) throw ConfigError("scheme.steps", "must be at least 1");
  c.tau = c.final_time / c.steps;
  c.steps_given = true;

  if (c.kernel_file.empty()) {
    if (!c.beta) throw ConfigError("kernel.beta", "required unless kernel.file is given");
    try {
      (void)load_builtin_prony(*c.beta);
    } catch (const NotFoundError&) {
      std::ostringstream msg;
      msg << "beta = " << *c.beta
          << " has no built-in Prony table; supported values are 3/7, 1/2, 3/5, or pass --kernel-file";
      throw ConfigError("kernel.beta", msg.str());
    }
  }
  if (c.forcing != "point" && c.forcing != "blend")
    throw ConfigError("forcing.evaluation", "must be \"point\" or \"blend\"");
  if (!(c.kernel_error_t_min > 0.0) || !(c.kernel_error_t_max > c.kernel_error_t_min))
    throw ConfigError("kernel_error.t_min", "window must satisfy 0 < t_min < t_max");
  if (c.kernel_error_samples < 2) throw ConfigError("kernel_error.samples", "must be at least 2");

  // Range checks shared with the library.
  to_experiment(c).validate();
  return c;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["kernel.beta"] = c.beta ? nlohmann::ordered_json(*c.beta) : nlohmann::ordered_json(nullptr);
  j["kernel.file"] = c.kernel_file;
  j["grid.n"] = c.grid_n;
  j["experiment.T"] = c.final_time;
  j["scheme.sigma"] = c.sigma;
  j["scheme.steps"] = c.steps;
  j["scheme.tau"] = c.tau ? nlohmann::ordered_json(*c.tau) : nlohmann::ordered_json(nullptr);
  j["study.ladder"] = c.ladder;
  j["reference.steps"] = c.reference_steps;
  j["solver.tol"] = c.solver_tol;
  j["solver.max_iter"] = c.solver_max_iter;
  j["solver.jacobi"] = c.solver_jacobi;
  j["forcing.evaluation"] = c.forcing;
  j["kernel_error.t_min"] = c.kernel_error_t_min;
  j["kernel_error.t_max"] = c.kernel_error_t_max;
  j["kernel_error.samples"] = c.kernel_error_samples;
  j["kernel_error.self"] = c.kernel_error_self;
  j["output.dir"] = c.output_dir;
  j["output.checkpoint"] = c.checkpoint;
  j["deterministic"] = c.deterministic;
  return j;
}

PronySeries select_kernel(const RunConfig& c) {
  if (!c.kernel_file.empty()) {
    try {
      return prony_from_file(c.kernel_file);
    } catch (const NotFoundError& e) {
      throw ConfigError("kernel.file", e.what());
    } catch (const FormatError& e) {
      throw ConfigError("kernel.file", e.what());
    } catch (const ValidationError& e) {
      throw ConfigError("kernel.file", e.what());
    }
  }
  return load_builtin_prony(c.beta.value_or(0.5));
}

ExperimentSpec to_experiment(const RunConfig& c) {
  ExperimentSpec spec;
  spec.kernel = select_kernel(c);
  spec.grid_n = c.grid_n;
  spec.final_time = c.final_time;
  spec.sigma = c.sigma;
  spec.steps = c.steps;
  spec.ladder = c.ladder;
  spec.reference_steps = c.reference_steps;
  spec.solver.tolerance = c.solver_tol;
  spec.solver.max_iterations = c.solver_max_iter;
  spec.solver.jacobi = c.solver_jacobi;
  spec.forcing = c.forcing == "blend" ? ForcingEvaluation::Blend : ForcingEvaluation::Point;
  spec.parallel = !c.deterministic;
  return spec;
}

std::filesystem::path output_directory(const RunConfig& c, const std::string& command) {
  if (!c.output_dir.empty()) return c.output_dir;
  const char* root = std::getenv("MEMSTEP_OUT");
  std::filesystem::path base = (root && *root) ? root : ".";
  return base / ("memstep-" + command);
}

}  // namespace memstep::app
