#include "memstep/schemes.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "memstep/errors.hpp"

namespace memstep {

void SchemeConfig::validate() const {
  if (!(sigma > 0.0 && sigma <= 1.0)) {
    std::ostringstream msg;
    msg << "sigma must be in (0,1], got " << sigma;
    throw ConfigError("scheme.sigma", msg.str());
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("scheme.tau", "time step must be > 0");
  if (n_steps < 1) throw ConfigError("scheme.steps", "need at least one step");
  if (!(solver.tolerance > 0.0)) throw ConfigError("solver.tol", "tolerance must be > 0");
  if (solver.max_iterations < 0) throw ConfigError("solver.max_iter", "must be >= 0 (0 selects the default)");
}

void ProblemSpec::validate() const {
  if (!A) throw ValidationError("problem has no operator A");
  if (!A->positive_definite()) throw ValidationError("operator A must be positive definite");
  if (B && !B->positive_definite()) throw ValidationError("operator B must be positive definite");
  if (forcing) {
    const auto phi0 = forcing(0.0);
    require_same_grid(phi0, u0);
  }
}

GridFunction weighted_forcing(const ProblemSpec& problem, const SchemeConfig& config, double t_n) {
  if (config.forcing == ForcingEvaluation::Point) return problem.forcing(t_n + config.sigma * config.tau);
  GridFunction phi = problem.forcing(t_n + config.tau);
  phi *= config.sigma;
  phi.axpy(1.0 - config.sigma, problem.forcing(t_n));
  return phi;
}

namespace {

void require_state(const ProblemSpec& problem, const SoeState& state) {
  if (state.aux.size() != problem.kernel.size())
    throw ValidationError("state carries a different number of memory variables than the kernel has terms");
  require_same_grid(state.y, problem.u0);
}

// Shared by soe_step (B, C null) and general_step, so that the two agree to
// the last bit whenever B is the identity and C vanishes.
SoeState advance(const ProblemSpec& problem, const SchemeConfig& config, const SoeState& state,
                 const OperatorPtr& B, const OperatorPtr& C) {
  config.validate();
  require_state(problem, state);
  const double sigma = config.sigma;
  const double tau = config.tau;
  const auto terms = problem.kernel.terms();
  const Grid2D& grid = state.y.grid();

  SoeState next{GridFunction(grid), {}, state.step + 1, static_cast<double>(state.step + 1) * tau};
  next.aux.reserve(terms.size());

  // chi_i from the auxiliary equation solved for level n+1:
  //   (1 + sigma b tau) y_i^{n+1} = (1 - (1-sigma) b tau) y_i^n + (1-sigma) tau y^n + sigma tau y^{n+1}
  GridFunction memory(grid);
  double mu = 0.0;
  const auto y = state.y.values();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double a = terms[i].weight;
    const double b = terms[i].rate;
    const double denom = 1.0 + sigma * b * tau;
    const double c_prev = (1.0 - sigma) * tau / denom;
    const double c_aux = (1.0 - (1.0 - sigma) * b * tau) / denom;
    GridFunction chi(grid);
    const auto yi = state.aux[i].values();
    auto ci = chi.values();
    auto mem = memory.values();
    for (std::size_t k = 0; k < ci.size(); ++k) {
      ci[k] = c_prev * y[k] + c_aux * yi[k];
      mem[k] += a * ((1.0 - sigma) * yi[k] + sigma * ci[k]);
    }
    mu += sigma * a * tau / denom;
    next.aux.push_back(std::move(chi));
  }

  GridFunction rhs(grid);
  if (B) {
    B->apply(state.y, rhs);
  } else {
    rhs = state.y;
  }
  if (C) rhs.axpy(-(1.0 - sigma) * tau, (*C)(state.y));
  if (problem.forcing) rhs.axpy(tau, weighted_forcing(problem, config, state.time));
  rhs.axpy(-tau, (*problem.A)(memory));

  static const OperatorPtr identity = std::make_shared<Identity>();
  std::vector<ScaledSum::Term> parts{{1.0, B ? B : identity}, {mu * sigma * tau, problem.A}};
  if (C) parts.emplace_back(sigma * tau, C);
  const ScaledSum system(std::move(parts));
  next.y = cg_solve(system, rhs, config.solver).solution;

  const auto y_next = next.y.values();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double gain = sigma * tau / (1.0 + sigma * terms[i].rate * tau);
    auto yi = next.aux[i].values();
    for (std::size_t k = 0; k < yi.size(); ++k) yi[k] += gain * y_next[k];
  }

  assert(auxiliary_residual(problem.kernel, config, state, next) <= 1e-12);
  return next;
}

}  // namespace

SoeState soe_init(const ProblemSpec& problem) {
  problem.validate();
  SoeState state{problem.u0, {}, 0, 0.0};
  state.aux.assign(problem.kernel.size(), GridFunction(problem.u0.grid()));
  return state;
}

SoeState soe_step(const ProblemSpec& problem, const SchemeConfig& config, const SoeState& state) {
  if ((problem.B && !is_identity(problem.B.get())) || problem.C)
    throw ValidationError("soe_step handles B = I and C = 0 only; use general_step");
  return advance(problem, config, state, nullptr, nullptr);
}

SoeState general_step(const ProblemSpec& problem, const SchemeConfig& config, const SoeState& state) {
  return advance(problem, config, state, problem.B, problem.C);
}

double energy(const ProblemSpec& problem, const SoeState& state) {
  require_state(problem, state);
  double sum = problem.B ? std::pow(a_norm(*problem.B, state.y), 2) : inner_product(state.y, state.y);
  const auto terms = problem.kernel.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double norm_a = a_norm(*problem.A, state.aux[i]);
    sum += terms[i].weight * norm_a * norm_a;
  }
  return std::sqrt(sum);
}

double auxiliary_residual(const PronySeries& kernel, const SchemeConfig& config, const SoeState& before,
                          const SoeState& after) {
  const double sigma = config.sigma;
  const double tau = config.tau;
  const auto terms = kernel.terms();
  if (before.aux.size() != terms.size() || after.aux.size() != terms.size())
    throw ValidationError("states do not match the kernel term count");
  const double norm_y = l2_norm(after.y);
  const auto y0 = before.y.values();
  const auto y1 = after.y.values();
  GridFunction r(after.y.grid());
  double worst = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double b = terms[i].rate;
    const auto v0 = before.aux[i].values();
    const auto v1 = after.aux[i].values();
    auto rv = r.values();
    for (std::size_t k = 0; k < rv.size(); ++k) {
      const double aux_mid = sigma * v1[k] + (1.0 - sigma) * v0[k];
      const double y_mid = sigma * y1[k] + (1.0 - sigma) * y0[k];
      rv[k] = (v1[k] - v0[k]) / tau + b * aux_mid - y_mid;
    }
    const double residual = l2_norm(r);
    const double scale = (norm_y + l2_norm(after.aux[i])) / tau;
    if (residual == 0.0) continue;
    worst = std::max(worst, scale > 0.0 ? residual / scale : INFINITY);
  }
  return worst;
}

bool accuracy_warning(const PronySeries& kernel, const SchemeConfig& config) {
  for (const auto& term : kernel.terms())
    if ((1.0 - config.sigma) * term.rate * config.tau > 1.0) return true;
  return false;
}

namespace {

double sinc(double x) { return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }
double sinhc(double x) { return std::abs(x) < 1e-4 ? 1.0 + x * x / 6.0 : std::sinh(x) / x; }

}  // namespace

double scalar_ode_oracle(double weight, double rate, double lambda, double u0, double t) {
  if (!(weight > 0.0) || !(rate >= 0.0) || !(lambda > 0.0))
    throw ValidationError("scalar oracle needs a > 0, b >= 0, lambda > 0");
  if (t < 0.0) throw DomainError("scalar oracle evaluated at negative time");
  const double half = 0.5 * rate;
  const double omega_sq = weight * lambda;
  const double disc = half * half - omega_sq;
  const double decay = std::exp(-half * t);
  if (disc <= 0.0) {
    // under- or critically damped: u0 e^{-bt/2} (cos W t + (b/2W) sin W t)
    const double w = std::sqrt(-disc);
    return u0 * decay * (std::cos(w * t) + half * t * sinc(w * t));
  }
  const double kappa = std::sqrt(disc);
  if (kappa * t < 1.0) return u0 * decay * (std::cosh(kappa * t) + half * t * sinhc(kappa * t));
  // overdamped, written with both roots to stay finite for large t
  const double ratio = half / kappa;
  return 0.5 * u0 *
         ((1.0 + ratio) * std::exp((kappa - half) * t) + (1.0 - ratio) * std::exp(-(kappa + half) * t));
}

}  // namespace memstep
