// Full-history baseline: the memory integral is re-evaluated over every past
// level at each step.

#include <cmath>

#include "memstep/errors.hpp"
#include "memstep/schemes.hpp"

namespace memstep {

namespace {

// Moments of exp(-b s) against the two halves of a hat function on [0, tau]:
//   rising  = int_0^tau exp(-b s) s/tau ds
//   falling = int_0^tau exp(-b s) (1 - s/tau) ds
struct HatMoments {
  double rising;
  double falling;
};

HatMoments hat_moments(double rate, double tau) {
  const double z = rate * tau;
  if (z < 0.1) {
    // alternating series sum_{k>=2} (-z)^{k-2} c_k / k!, truncated at k = 12
    double rising = 0.0;
    double falling = 0.0;
    double power = 1.0;  // (-z)^{k-2}
    double factorial = 2.0;
    for (int k = 2; k <= 12; ++k) {
      if (k > 2) {
        power *= -z;
        factorial *= k;
      }
      rising += (k - 1) * power / factorial;
      falling += power / factorial;
    }
    return {tau * rising, tau * falling};
  }
  const double e = std::exp(-z);
  return {tau * (1.0 - e * (1.0 + z)) / (z * z), tau * (z - 1.0 + e) / (z * z)};
}

// Quadrature weights W_{j,l} of int_0^{t^j} k(t^j - s) g(s) ds ~ sum_l W_{j,l} g(t^l).
// They depend on the lag d = j - l, with separate values for the two endpoints.
class LagWeights {
 public:
  LagWeights(const PronySeries& kernel, double tau, HistoryQuadrature rule)
      : kernel_(kernel), tau_(tau), rule_(rule) {
    for (const auto& term : kernel.terms()) moments_.push_back(hat_moments(term.rate, tau));
  }

  /// Interior node at lag d, 1 <= d <= j - 1.
  double interior(long d) const {
    if (rule_ == HistoryQuadrature::NodalTrapezoid) return tau_ * kernel_(d * tau_);
    double w = 0.0;
    const auto terms = kernel_.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double b = terms[i].rate;
      w += terms[i].weight * (std::exp(-b * (d - 1) * tau_) * moments_[i].rising +
                              std::exp(-b * d * tau_) * moments_[i].falling);
    }
    return w;
  }

  /// The s = 0 endpoint when integrating up to t^j.
  double first(long j) const {
    if (rule_ == HistoryQuadrature::NodalTrapezoid) return 0.5 * tau_ * kernel_(j * tau_);
    double w = 0.0;
    const auto terms = kernel_.terms();
    for (std::size_t i = 0; i < terms.size(); ++i)
      w += terms[i].weight * std::exp(-terms[i].rate * (j - 1) * tau_) * moments_[i].rising;
    return w;
  }

  /// The s = t^j endpoint (lag zero); multiplies the implicit unknown.
  double last() const {
    if (rule_ == HistoryQuadrature::NodalTrapezoid) return 0.5 * tau_ * kernel_(0.0);
    double w = 0.0;
    const auto terms = kernel_.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) w += terms[i].weight * moments_[i].falling;
    return w;
  }

 private:
  const PronySeries& kernel_;
  double tau_;
  HistoryQuadrature rule_;
  std::vector<HatMoments> moments_;
};

void require_plain(const ProblemSpec& problem) {
  if ((problem.B && !is_identity(problem.B.get())) || problem.C)
    throw ValidationError("the full-history baseline handles B = I and C = 0 only");
}

}  // namespace

HistoryState history_init(const ProblemSpec& problem) {
  problem.validate();
  require_plain(problem);
  return HistoryState{{problem.u0}, GridFunction(problem.u0.grid()), 0, 0.0};
}

HistoryState quadrature_step(const ProblemSpec& problem, const SchemeConfig& config, const HistoryState& state,
                             HistoryQuadrature rule) {
  config.validate();
  require_plain(problem);
  if (state.levels.size() != static_cast<std::size_t>(state.step + 1))
    throw ValidationError("history state must hold every level 0..n");
  const double sigma = config.sigma;
  const double tau = config.tau;
  const long j = state.step + 1;
  const LagWeights weights(problem.kernel, tau, rule);
  const Grid2D& grid = problem.u0.grid();

  // Known part of S^{n+1}: every level except the implicit t^{n+1} endpoint.
  GridFunction partial(grid);
  partial.axpy(weights.first(j), state.levels.front());
  for (long l = 1; l < j; ++l) partial.axpy(weights.interior(j - l), state.levels[static_cast<std::size_t>(l)]);

  GridFunction blended = state.memory;
  blended *= 1.0 - sigma;
  blended.axpy(sigma, partial);

  GridFunction rhs = state.levels.back();
  if (problem.forcing) rhs.axpy(tau, weighted_forcing(problem, config, state.time));
  rhs.axpy(-tau, (*problem.A)(blended));

  const double implicit_weight = weights.last();
  static const OperatorPtr identity = std::make_shared<Identity>();
  const ScaledSum system({{1.0, identity}, {sigma * tau * implicit_weight, problem.A}});
  GridFunction y_next = cg_solve(system, rhs, config.solver).solution;

  HistoryState next{state.levels, std::move(partial), j, static_cast<double>(j) * tau};
  next.memory.axpy(implicit_weight, y_next);
  next.levels.push_back(std::move(y_next));
  return next;
}

}  // namespace memstep
