#pragma once

// Two-level weighted time stepping for
//
//   B du/dt + int_0^t k(t-s) A u(s) ds + C u = phi(t),   u(0) = u0,
//
// with k a Prony series. The memory integral is carried by one auxiliary
// grid function per exponential term,
//
//   y_i(t) = int_0^t exp(-b_i (t-s)) u(s) ds,   dy_i/dt + b_i y_i = u,
//
// so a step touches only the current level. A full-history quadrature
// stepper is provided as the baseline the compressed form replaces.

#include <functional>
#include <optional>
#include <vector>

#include "memstep/cg.hpp"
#include "memstep/grid.hpp"
#include "memstep/kernels.hpp"
#include "memstep/operators.hpp"

namespace memstep {

/// How phi^{n+sigma} is formed from the forcing.
enum class ForcingEvaluation {
  Point,  // phi(t^n + sigma tau)
  Blend,  // sigma phi(t^{n+1}) + (1 - sigma) phi(t^n)
};

struct SchemeConfig {
  double sigma = 0.5;
  double tau = 0.01;
  int n_steps = 100;
  CgOptions solver{};
  ForcingEvaluation forcing = ForcingEvaluation::Point;

  /// Throws ConfigError naming the field: needs 0 < sigma <= 1, tau > 0, n_steps >= 1.
  void validate() const;
  /// Energy stability holds for every tau when sigma >= 1/2.
  bool stability_guaranteed() const noexcept { return sigma >= 0.5; }
};

using Forcing = std::function<GridFunction(double t)>;

struct ProblemSpec {
  OperatorPtr A;  // positive definite
  OperatorPtr B;  // positive definite; null means identity
  OperatorPtr C;  // positive semidefinite; null means absent
  PronySeries kernel;
  Forcing forcing;  // empty means zero
  GridFunction u0;

  /// Throws ValidationError if A is missing or the definiteness requirements fail.
  void validate() const;
};

/// Level n of the compressed scheme: the solution and its m memory variables.
struct SoeState {
  GridFunction y;
  std::vector<GridFunction> aux;
  long step = 0;
  double time = 0.0;
};

/// Level n of the full-history baseline. `memory` holds the quadrature sum
/// S^n = sum_l w_{n,l} y^l, so that the memory term at t^n is A S^n.
struct HistoryState {
  std::vector<GridFunction> levels;
  GridFunction memory;
  long step = 0;
  double time = 0.0;
};

enum class HistoryQuadrature {
  ProductTrapezoid,  // kernel integrated exactly against the piecewise-linear interpolant
  NodalTrapezoid,    // composite trapezoid with the kernel sampled at the nodes
};

/// phi^{n+sigma} for the step leaving t^n, per config.forcing. Requires problem.forcing.
GridFunction weighted_forcing(const ProblemSpec& problem, const SchemeConfig& config, double t_n);

SoeState soe_init(const ProblemSpec& problem);

/// One step of the scheme with B = I and no C term. Throws ValidationError
/// when B or C are set (use general_step) and propagates solver failures.
SoeState soe_step(const ProblemSpec& problem, const SchemeConfig& config, const SoeState& state);

/// One step with general B and C: solves (B + sigma tau (mu A + C)) y^{n+1} = chi^n.
SoeState general_step(const ProblemSpec& problem, const SchemeConfig& config, const SoeState& state);

HistoryState history_init(const ProblemSpec& problem);

/// One step of the full-history weighted scheme
///   (y^{n+1} - y^n)/tau + sigma Q^{n+1} + (1 - sigma) Q^n = phi^{n+sigma},
/// Q^j the quadrature of int_0^{t^j} k(t^j - s) A y(s) ds. Memory and work grow
/// linearly with n. Requires B and C unset.
HistoryState quadrature_step(const ProblemSpec& problem, const SchemeConfig& config, const HistoryState& state,
                             HistoryQuadrature rule = HistoryQuadrature::ProductTrapezoid);

/// (||y||_B^2 + sum_i a_i ||y_i||_A^2)^{1/2}.
double energy(const ProblemSpec& problem, const SoeState& state);

/// Largest scaled residual of the discrete auxiliary equations between two levels,
///   max_i ||(y_i^{n+1} - y_i^n)/tau + b_i y_i^{n+sigma} - y^{n+sigma}||
///         / ((||y^{n+1}|| + ||y_i^{n+1}||) / tau).
double auxiliary_residual(const PronySeries& kernel, const SchemeConfig& config, const SoeState& before,
                          const SoeState& after);

/// True when some term has (1 - sigma) b_i tau > 1: still stable for sigma >= 1/2,
/// but the explicit part of that auxiliary update loses accuracy.
bool accuracy_warning(const PronySeries& kernel, const SchemeConfig& config);

/// Closed-form solution of u'' + b u' + a lambda u = 0, u(0) = u0, u'(0) = 0:
/// the single-term, scalar, unforced case of the memory equation.
double scalar_ode_oracle(double weight, double rate, double lambda, double u0, double t);

}  // namespace memstep
