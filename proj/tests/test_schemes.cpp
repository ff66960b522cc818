#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "memstep/errors.hpp"
#include "memstep/experiments.hpp"
#include "memstep/schemes.hpp"

using namespace memstep;

namespace {

// A 2 x 2 grid has a single interior node, so diagonal operators act as scalars.
const Grid2D kPoint(2);

GridFunction scalar(double v) { return GridFunction(kPoint, {v}); }

ProblemSpec scalar_problem(double lambda, PronySeries kernel, double u0) {
  return ProblemSpec{std::make_shared<DiagonalScaling>(kPoint, lambda), nullptr, nullptr, std::move(kernel), {},
                     scalar(u0)};
}

SchemeConfig scheme(double sigma, double tau, int steps) {
  SchemeConfig cfg;
  cfg.sigma = sigma;
  cfg.tau = tau;
  cfg.n_steps = steps;
  cfg.solver.tolerance = 1e-14;
  return cfg;
}

ProblemSpec model(int n, double beta = 0.5) {
  ExperimentSpec spec;
  spec.grid_n = n;
  spec.kernel = load_builtin_prony(beta);
  return model_problem(spec);
}

// max over steps of |y^n - u(t^n)| for the one-term scalar problem
double scalar_error(double sigma, int steps, double t_end, double a, double b, double lambda) {
  const ProblemSpec p = scalar_problem(lambda, PronySeries({{a, b}}), 1.0);
  const SchemeConfig cfg = scheme(sigma, t_end / steps, steps);
  SoeState s = soe_init(p);
  double worst = 0.0;
  for (int n = 0; n < steps; ++n) {
    s = soe_step(p, cfg, s);
    worst = std::max(worst, std::abs(s.y[0] - scalar_ode_oracle(a, b, lambda, 1.0, s.time)));
  }
  return worst;
}

double observed_order(double sigma) {
  std::vector<double> taus, errors;
  for (int steps : {200, 400, 800, 1600}) {
    taus.push_back(10.0 / steps);
    errors.push_back(scalar_error(sigma, steps, 10.0, 1.0, 0.5, 4.0));
  }
  return fit_slope(taus, errors).value();
}

}  // namespace

TEST(SchemeConfig, Validation) {
  EXPECT_NO_THROW(scheme(0.5, 0.1, 1).validate());
  for (double sigma : {0.0, -0.1, 1.5, std::nan("")}) {
    try {
      scheme(sigma, 0.1, 1).validate();
      FAIL() << sigma;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), "scheme.sigma");
      EXPECT_NE(std::string(e.what()).find("(0,1]"), std::string::npos);
    }
  }
  EXPECT_THROW(scheme(0.5, 0.0, 1).validate(), ConfigError);
  EXPECT_THROW(scheme(0.5, 0.1, 0).validate(), ConfigError);
  EXPECT_TRUE(scheme(0.5, 1, 1).stability_guaranteed());
  EXPECT_FALSE(scheme(0.4, 1, 1).stability_guaranteed());
}

TEST(SoeInit, AuxiliariesZero) {
  const ProblemSpec p = model(8);
  const SoeState s = soe_init(p);
  EXPECT_EQ(s.aux.size(), 12u);
  for (const auto& v : s.aux) EXPECT_EQ(max_abs(v), 0.0);
  EXPECT_EQ(s.y, p.u0);
  EXPECT_EQ(s.step, 0);
  EXPECT_EQ(s.time, 0.0);

  ProblemSpec zero = p;
  zero.u0 = GridFunction(p.u0.grid());
  EXPECT_EQ(max_abs(soe_init(zero).y), 0.0);

  ProblemSpec broken = p;
  broken.A = nullptr;
  EXPECT_THROW(soe_init(broken), ValidationError);
  broken.A = std::make_shared<DiagonalScaling>(Grid2D(8), 0.0);
  EXPECT_THROW(soe_init(broken), ValidationError);
}

TEST(SoeStep, ZeroStaysZero) {
  ProblemSpec p = model(8);
  p.u0 = GridFunction(p.u0.grid());
  SoeState s = soe_init(p);
  for (int n = 0; n < 5; ++n) s = soe_step(p, scheme(0.5, 0.1, 5), s);
  EXPECT_EQ(max_abs(s.y), 0.0);
  for (const auto& v : s.aux) EXPECT_EQ(max_abs(v), 0.0);
}

TEST(SoeStep, HandEvaluatedStep) {
  // sigma = 1, a = 1, b = 0, lambda = 1, tau = 1, u0 = 1:
  // chi_1 = 0, mu = 1, (1 + 1) y^1 = 1, y_1^1 = chi_1 + y^1.
  const ProblemSpec p = scalar_problem(1.0, PronySeries({{1.0, 0.0}}), 1.0);
  const SoeState s = soe_step(p, scheme(1.0, 1.0, 1), soe_init(p));
  EXPECT_DOUBLE_EQ(s.y[0], 0.5);
  EXPECT_DOUBLE_EQ(s.aux[0][0], 0.5);
  EXPECT_EQ(s.step, 1);
  EXPECT_EQ(s.time, 1.0);
}

TEST(SoeStep, HandEvaluatedCrankNicolsonStep) {
  // sigma = 1/2, a = 2, b = 1, lambda = 3, tau = 0.5, u0 = 1, evaluated by hand:
  // chi_1 = (0.25 * 1) / 1.25 = 0.2, mu = 0.5 / 1.25 = 0.4,
  // rhs = 1 - 0.5 * 2 * 3 * (0.5 * 0.2) = 0.7, (1 + 0.25 * 0.4 * 3) y = 0.7 -> y = 0.7 / 1.3,
  // y_1 = 0.2 + 0.25 / 1.25 * y.
  const ProblemSpec p = scalar_problem(3.0, PronySeries({{2.0, 1.0}}), 1.0);
  const SoeState s = soe_step(p, scheme(0.5, 0.5, 1), soe_init(p));
  EXPECT_NEAR(s.y[0], 0.7 / 1.3, 1e-15);
  EXPECT_NEAR(s.aux[0][0], 0.2 + 0.2 * (0.7 / 1.3), 1e-15);
}

TEST(SoeStep, RejectsGeneralOperators) {
  ProblemSpec p = model(6);
  p.C = std::make_shared<DiagonalScaling>(Grid2D(6), 1.0);
  EXPECT_THROW(soe_step(p, scheme(0.5, 0.1, 1), soe_init(p)), ValidationError);
  EXPECT_THROW(soe_step(model(6), scheme(1.5, 0.1, 1), soe_init(model(6))), ConfigError);
}

TEST(SoeStep, AuxiliaryResidualVanishes) {
  for (double sigma : {0.5, 0.75, 1.0}) {
    for (double tau : {1e-3, 0.1, 1.0, 10.0}) {
      const ProblemSpec p = model(16);
      const SchemeConfig cfg = scheme(sigma, tau, 10);
      SoeState s = soe_init(p);
      for (int n = 0; n < 10; ++n) {
        const SoeState next = soe_step(p, cfg, s);
        EXPECT_LE(auxiliary_residual(p.kernel, cfg, s, next), 1e-12) << sigma << " " << tau;
        s = next;
      }
    }
  }
}

TEST(SoeStep, AuxiliaryResidualDetectsWrongUpdate) {
  const ProblemSpec p = model(8);
  const SchemeConfig cfg = scheme(0.5, 0.1, 1);
  const SoeState s = soe_init(p);
  SoeState next = soe_step(p, cfg, s);
  next.aux[3] *= 1.001;
  EXPECT_GT(auxiliary_residual(p.kernel, cfg, s, next), 1e-6);
}

TEST(SoeStep, ScalarOracleOrders) {
  EXPECT_NEAR(observed_order(0.5), 2.0, 0.2);
  EXPECT_NEAR(observed_order(1.0), 1.0, 0.2);
  EXPECT_LT(scalar_error(0.5, 1600, 10.0, 1.0, 0.5, 4.0), 1e-4);
}

TEST(SoeStep, DeterministicAndTimeBookkeeping) {
  const ProblemSpec p = model(12);
  const SchemeConfig cfg = scheme(0.5, 0.1, 7);
  SoeState a = soe_init(p), b = soe_init(p);
  for (int n = 0; n < 7; ++n) {
    a = soe_step(p, cfg, a);
    b = soe_step(p, cfg, b);
  }
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.step, 7);
  EXPECT_DOUBLE_EQ(a.time, 0.7);
}

TEST(GeneralStep, ReducesBitForBit) {
  ProblemSpec plain = model(16);
  ProblemSpec general = plain;
  general.B = std::make_shared<Identity>();
  for (double sigma : {0.5, 1.0}) {
    const SchemeConfig cfg = scheme(sigma, 0.05, 20);
    SoeState a = soe_init(plain), b = soe_init(general);
    for (int n = 0; n < 20; ++n) {
      a = soe_step(plain, cfg, a);
      b = general_step(general, cfg, b);
      ASSERT_EQ(a.y, b.y) << n;
      for (std::size_t i = 0; i < a.aux.size(); ++i) ASSERT_EQ(a.aux[i], b.aux[i]);
    }
  }
}

TEST(GeneralStep, ScaledMassHandStep) {
  // B = 2, A = 1, a = 1, b = 0, sigma = 1, tau = 1, u0 = 1:
  // chi_1 = 0, mu = 1, (2 + 1) y^1 = 2 y^0.
  ProblemSpec p = scalar_problem(1.0, PronySeries({{1.0, 0.0}}), 1.0);
  p.B = std::make_shared<DiagonalScaling>(kPoint, 2.0);
  const SoeState s = general_step(p, scheme(1.0, 1.0, 1), soe_init(p));
  EXPECT_DOUBLE_EQ(s.y[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.aux[0][0], 2.0 / 3.0);
  EXPECT_NEAR(energy(p, s), std::sqrt(2 * 4.0 / 9 + 4.0 / 9) * 0.5, 1e-15);
}

TEST(GeneralStep, ScaledMassWithVanishingMemoryKeepsState) {
  ProblemSpec p = scalar_problem(1.0, PronySeries({{1e-300, 0.0}}), 1.25);
  p.B = std::make_shared<DiagonalScaling>(kPoint, 2.0);
  const SoeState s = general_step(p, scheme(1.0, 0.5, 1), soe_init(p));
  EXPECT_EQ(s.y[0], 1.25);
}

TEST(GeneralStep, ReactionTermDecay) {
  // du/dt + u = 0 with a negligible memory term: the theta scheme's amplification
  // factor (1 - (1 - sigma) tau) / (1 + sigma tau), and exp(-t) within scheme order.
  for (double sigma : {0.5, 1.0}) {
    ProblemSpec p = scalar_problem(1.0, PronySeries({{1e-14, 1.0}}), 1.0);
    p.C = std::make_shared<DiagonalScaling>(kPoint, 1.0);
    const double tau = 0.01;
    const SchemeConfig cfg = scheme(sigma, tau, 100);
    SoeState s = soe_init(p);
    for (int n = 0; n < 100; ++n) s = general_step(p, cfg, s);
    const double factor = (1 - (1 - sigma) * tau) / (1 + sigma * tau);
    EXPECT_NEAR(s.y[0], std::pow(factor, 100), 1e-12);
    EXPECT_NEAR(s.y[0], std::exp(-1.0), sigma == 0.5 ? 1e-5 : 5e-3);
  }
}

TEST(Energy, Values) {
  const ProblemSpec p = model(16);
  const SoeState s0 = soe_init(p);
  EXPECT_NEAR(energy(p, s0), l2_norm(p.u0), 1e-15);

  ProblemSpec zero = p;
  zero.u0 = GridFunction(p.u0.grid());
  EXPECT_EQ(energy(zero, soe_init(zero)), 0.0);

  // m = 1, a = 2: (||y||^2 + 2 ||y_1||_A^2)^{1/2}
  const Grid2D g(6);
  auto lap = std::make_shared<FivePointLaplacian>(g);
  const ProblemSpec q{lap, nullptr, nullptr, PronySeries({{2.0, 1.0}}), {}, GridFunction(g)};
  SoeState s{sample_function(g, [](double x, double y) { return x + y * y; }),
             {sample_function(g, [](double x, double) { return x * (1 - x); })}, 0, 0.0};
  const double direct = inner_product(s.y, s.y) + 2 * inner_product(apply_laplacian(g, s.aux[0]), s.aux[0]);
  EXPECT_NEAR(energy(q, s), std::sqrt(direct), 1e-14);
}

TEST(Energy, NonIncreasingWithoutForcing) {
  for (double sigma : {0.5, 0.75, 1.0}) {
    for (double tau : {1e-3, 1e-1, 1.0, 10.0}) {
      const ProblemSpec p = model(16);
      const SchemeConfig cfg = scheme(sigma, tau, 30);
      SoeState s = soe_init(p);
      const double e0 = energy(p, s);
      double previous = e0;
      for (int n = 0; n < 30; ++n) {
        s = soe_step(p, cfg, s);
        const double e = energy(p, s);
        ASSERT_LE(e, previous + 1e-8 * e0) << sigma << " " << tau << " step " << n;
        previous = e;
      }
    }
  }
}

TEST(Energy, BoundedByForcingWork) {
  ProblemSpec p = model(12);
  const GridFunction shape = sample_function(Grid2D(12), [](double x, double y) { return x * (1 - y); });
  p.forcing = [shape](double t) { return std::cos(3 * t) * shape; };
  for (auto evaluation : {ForcingEvaluation::Point, ForcingEvaluation::Blend}) {
    SchemeConfig cfg = scheme(0.5, 0.2, 40);
    cfg.forcing = evaluation;
    SoeState s = soe_init(p);
    const double e0 = energy(p, s);
    double budget = e0;
    for (int n = 0; n < 40; ++n) {
      budget += cfg.tau * l2_norm(weighted_forcing(p, cfg, s.time));
      s = soe_step(p, cfg, s);
      ASSERT_LE(energy(p, s), budget + 1e-8 * e0) << n;
    }
  }
}

TEST(Forcing, Evaluations) {
  ProblemSpec p = scalar_problem(1.0, PronySeries({{1.0, 1.0}}), 0.0);
  p.forcing = [](double t) { return scalar(t * t); };
  SchemeConfig cfg = scheme(0.5, 0.2, 1);
  EXPECT_NEAR(weighted_forcing(p, cfg, 1.0)[0], 1.1 * 1.1, 1e-15);
  cfg.forcing = ForcingEvaluation::Blend;
  EXPECT_NEAR(weighted_forcing(p, cfg, 1.0)[0], 0.5 * 1.44 + 0.5 * 1.0, 1e-15);
}

TEST(Forcing, ManufacturedSolutionSecondOrder) {
  // u = cos t with k = e^{-t}: u' + int_0^t e^{-(t-s)} lambda u ds = phi,
  // int_0^t e^{-(t-s)} cos s ds = (cos t + sin t - e^{-t}) / 2.
  const double lambda = 2.0;
  ProblemSpec p = scalar_problem(lambda, PronySeries({{1.0, 1.0}}), 1.0);
  p.forcing = [lambda](double t) {
    return scalar(-std::sin(t) + lambda * 0.5 * (std::cos(t) + std::sin(t) - std::exp(-t)));
  };
  std::vector<double> taus, errors;
  for (int steps : {40, 80, 160}) {
    const SchemeConfig cfg = scheme(0.5, 2.0 / steps, steps);
    SoeState s = soe_init(p);
    double worst = 0.0;
    for (int n = 0; n < steps; ++n) {
      s = soe_step(p, cfg, s);
      worst = std::max(worst, std::abs(s.y[0] - std::cos(s.time)));
    }
    taus.push_back(cfg.tau);
    errors.push_back(worst);
  }
  EXPECT_NEAR(fit_slope(taus, errors).value(), 2.0, 0.2);
}

TEST(Quadrature, HandEvaluatedStep) {
  // constant kernel, sigma = 1, tau = 1: y^1 - y^0 + (y^0 + y^1) / 2 = 0 -> y^1 = 1/3.
  const ProblemSpec p = scalar_problem(1.0, PronySeries({{1.0, 0.0}}), 1.0);
  for (auto rule : {HistoryQuadrature::ProductTrapezoid, HistoryQuadrature::NodalTrapezoid}) {
    const HistoryState h = quadrature_step(p, scheme(1.0, 1.0, 1), history_init(p), rule);
    EXPECT_NEAR(h.levels.back()[0], 1.0 / 3.0, 1e-15);
    EXPECT_EQ(h.levels.size(), 2u);
    EXPECT_EQ(h.step, 1);
  }
}

TEST(Quadrature, ProductWeightsHandStep) {
  // k = e^{-t}, sigma = 1, tau = 1, lambda = 1. Exact integral of the linear interpolant:
  // int_0^1 e^{-(1-s)} ((1-s) y0 + s y1) ds = (1 - 2/e) y0 + (1/e) y1.
  const ProblemSpec p = scalar_problem(1.0, PronySeries({{1.0, 1.0}}), 1.0);
  const HistoryState h = quadrature_step(p, scheme(1.0, 1.0, 1), history_init(p));
  const double wy0 = 1 - 2 / std::numbers::e;
  const double wy1 = 1 / std::numbers::e;
  EXPECT_NEAR(h.levels.back()[0], (1 - wy0) / (1 + wy1), 1e-14);
}

TEST(Quadrature, ZeroProblem) {
  ProblemSpec p = model(8);
  p.u0 = GridFunction(p.u0.grid());
  HistoryState h = history_init(p);
  for (int n = 0; n < 6; ++n) h = quadrature_step(p, scheme(0.5, 0.1, 6), h);
  for (const auto& level : h.levels) EXPECT_EQ(max_abs(level), 0.0);
}

TEST(Quadrature, ConvergesToCompressedScheme) {
  const ProblemSpec p = model(16);
  std::vector<double> taus, diffs;
  for (int steps : {25, 50, 100}) {
    const SchemeConfig cfg = scheme(0.5, 1.0 / steps, steps);
    SoeState s = soe_init(p);
    HistoryState h = history_init(p);
    double worst = 0.0;
    for (int n = 0; n < steps; ++n) {
      s = soe_step(p, cfg, s);
      h = quadrature_step(p, cfg, h);
      worst = std::max(worst, max_abs(s.y - h.levels.back()));
    }
    EXPECT_EQ(h.levels.size(), static_cast<std::size_t>(steps + 1));
    taus.push_back(cfg.tau);
    diffs.push_back(worst);
  }
  EXPECT_NEAR(fit_slope(taus, diffs).value(), 2.0, 0.2);
}

TEST(Quadrature, SingleExponentialMatchesScalarOracle) {
  const double a = 1.0, b = 0.5, lambda = 4.0;
  const ProblemSpec p = scalar_problem(lambda, PronySeries({{a, b}}), 1.0);
  const SchemeConfig cfg = scheme(0.5, 0.01, 500);
  HistoryState h = history_init(p);
  for (int n = 0; n < 500; ++n) h = quadrature_step(p, cfg, h);
  EXPECT_NEAR(h.levels.back()[0], scalar_ode_oracle(a, b, lambda, 1.0, 5.0), 1e-4);
}

TEST(ScalarOracle, ClosedForms) {
  EXPECT_EQ(scalar_ode_oracle(1.0, 0.3, 2.0, 1.7, 0.0), 1.7);
  for (double t : {0.1, 1.0, 2.5, 7.0}) {
    EXPECT_NEAR(scalar_ode_oracle(1.0, 0.0, 9.0, 2.0, t), 2.0 * std::cos(3.0 * t), 1e-14);
    EXPECT_NEAR(scalar_ode_oracle(1.0, 2.0, 1.0, 1.0, t), (1 + t) * std::exp(-t), 1e-14);
    // overdamped: roots -1 and -3 for u'' + 4u' + 3u = 0, u'(0) = 0
    EXPECT_NEAR(scalar_ode_oracle(3.0, 4.0, 1.0, 1.0, t), 1.5 * std::exp(-t) - 0.5 * std::exp(-3 * t), 1e-14);
  }
  // near-critical damping stays continuous
  EXPECT_NEAR(scalar_ode_oracle(1.0, 2.0 + 1e-9, 1.0, 1.0, 3.0), 4 * std::exp(-3.0), 1e-8);
  EXPECT_NEAR(scalar_ode_oracle(1.0, 2.0 - 1e-9, 1.0, 1.0, 3.0), 4 * std::exp(-3.0), 1e-8);
}

TEST(AccuracyWarning, Flag) {
  const PronySeries k = load_builtin_prony(0.5);
  EXPECT_FALSE(accuracy_warning(k, scheme(0.5, 1e-3, 1)));
  EXPECT_TRUE(accuracy_warning(k, scheme(0.5, 0.01, 1)));
  EXPECT_FALSE(accuracy_warning(k, scheme(1.0, 10.0, 1)));
}
