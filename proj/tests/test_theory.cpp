#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "cheapsvrg/theory.hpp"

using namespace cheapsvrg;
using namespace cheapsvrg::theory;

namespace {

// Formula oracle in long double, written from the closed forms.
long double oracle_rho(long double eta, long double L, long double gamma, long double K, long double s,
                       long double q, long double r) {
  const long double first_slack = q - 4 * L * eta * r;
  const long double second_slack = r > 1 ? 1 - 4 * L * eta * r : q - 4 * L * eta;
  const long double coupling = r > 1 ? 4 * L * eta * (r + 1 / s) : 4 * L * eta * (s + q) / s;
  return q / (eta * first_slack * K * gamma) + coupling / second_slack;
}

long double oracle_kappa(long double eta, long double L, long double s, long double K, long double q,
                         long double r, long double zeta, long double xi, long double rho) {
  const long double lead = r > 1 ? 1 / (1 - 4 * L * eta * r) : q / (q - 4 * L * eta);
  return lead * (2 * eta / s + zeta / K) * std::max(xi, xi * xi) / (1 - rho);
}

std::uint64_t power_oracle(double rho, double phi0, double eps) {
  std::uint64_t t = 0;
  long double v = phi0;
  while (v > eps / 2.0L) {
    v *= rho;
    ++t;
  }
  return t;
}

struct Tuple {
  double eta, L, gamma;
  std::size_t K, s, q;
};

Tuple sample_feasible(SeededRng& rng) {
  Tuple t{};
  t.L = 1.0 + 9.0 * rng.uniform();
  t.gamma = t.L * (0.01 + 0.99 * rng.uniform());
  t.s = 1 + rng.uniform_index(100);
  t.q = 1 + rng.uniform_index(8);
  const double qd = static_cast<double>(t.q), sd = static_cast<double>(t.s);
  const double eta_max = std::min(qd * sd / (4.0 * t.L * (3.0 * sd + 2.0 * qd)), sd / (4.0 * t.L * (3.0 * sd + 2.0)));
  t.eta = eta_max * (0.01 + 0.98 * rng.uniform());
  const double k_min = std::max(2.0 * qd / (t.gamma * t.eta * (qd - 4.0 * t.L * t.eta)),
                                2.0 / (t.gamma * t.eta * (1.0 - 4.0 * t.L * t.eta)));
  t.K = static_cast<std::size_t>(std::ceil(k_min * (1.05 + 9.0 * rng.uniform())));
  return t;
}

}  // namespace

TEST(Rho, ReferenceValues) {
  EXPECT_NEAR(rho_basic(0.025, 1, 0.1, 4000, 10), 1.0 / 9.0 + 0.11 / 0.9, 1e-12);
  EXPECT_NEAR(rho_basic(0.025, 1, 0.1, 4000, 10), 0.233333, 1e-6);
  EXPECT_NEAR(rho_minibatch(0.05, 1, 0.1, 4000, 10, 2), 2.0 / 36.0 + 2.4 / 18.0, 1e-12);
  EXPECT_NEAR(rho_minibatch(0.05, 1, 0.1, 4000, 10, 2), 0.188889, 1e-6);
  // 1/(0.0125 * 0.9 * 8000 * 0.1) + 0.05 * 2.1 / 0.9
  EXPECT_NEAR(rho_coordinate(0.0125, 1, 0.1, 8000, 10, 4, 2), 1.0 / 9.0 + 0.105 / 0.9, 1e-12);
  EXPECT_NEAR(rho_coordinate(0.0125, 1, 0.1, 8000, 10, 4, 2), 0.2277778, 1e-6);
}

TEST(Rho, Reductions) {
  SeededRng rng(3);
  for (int k = 0; k < 200; ++k) {
    const Tuple t = sample_feasible(rng);
    const double basic = rho_basic(t.eta, t.L, t.gamma, t.K, t.s);
    EXPECT_EQ(rho_minibatch(t.eta, t.L, t.gamma, t.K, t.s, 1), basic);
    EXPECT_EQ(rho_coordinate(t.eta, t.L, t.gamma, t.K, t.s, 7, 7), basic);
  }
}

TEST(Rho, Limits) {
  const double second = 0.1 / 0.9;
  EXPECT_NEAR(rho_basic(0.025, 1, 0.1, 4000, 1000000000), 1.0 / 9.0 + second, 1e-9);
  EXPECT_NEAR(rho_basic(0.025, 1, 0.1, std::numeric_limits<std::size_t>::max(), 10), 0.11 / 0.9, 1e-12);
  const double a = rho_minibatch(0.05, 1, 0.1, 4000, 10, 2) - rho_minibatch(0.05, 1, 0.1, 1e9, 10, 2);
  const double b = rho_minibatch(0.05, 1, 0.1, 8000, 10, 2) - rho_minibatch(0.05, 1, 0.1, 1e9, 10, 2);
  EXPECT_NEAR(a / b, 2.0, 1e-4);
}

TEST(Rho, StabilityViolationsThrow) {
  EXPECT_THROW(rho_basic(0.25, 1, 0.1, 100, 10), InfeasibleStep);
  EXPECT_THROW(rho_minibatch(0.5, 1, 0.1, 100, 10, 2), InfeasibleStep);
  EXPECT_THROW(rho_coordinate(0.125, 1, 0.1, 100, 10, 4, 2), InfeasibleStep);
}

TEST(Rho, StrictlyDecreasingInKAndS) {
  SeededRng rng(4);
  for (int k = 0; k < 500; ++k) {
    const Tuple t = sample_feasible(rng);
    const double base = rho_basic(t.eta, t.L, t.gamma, t.K, t.s);
    EXPECT_LT(rho_basic(t.eta, t.L, t.gamma, t.K + 1, t.s), base);
    EXPECT_LT(rho_basic(t.eta, t.L, t.gamma, t.K, t.s + 1), base);
  }
}

TEST(Kappa, ReferenceValues) {
  const double rho = rho_basic(0.025, 1, 0.1, 4000, 10);
  EXPECT_NEAR(kappa_basic(0.025, 1, 10, 4000, 1.0, 0.5, rho), (1.0 / 0.9) * 0.00525 * 0.5 / (1.0 - rho), 1e-15);
  EXPECT_NEAR(kappa_basic(0.025, 1, 10, 4000, 1.0, 0.5, 0.233333), 0.0038043, 1e-7);
  EXPECT_EQ(kappa_basic(0.025, 1, 10, 4000, 1.0, 0.0, rho), 0.0);
  EXPECT_THROW(kappa_basic(0.025, 1, 10, 4000, 1.0, 0.5, 1.0), NoConvergence);
  EXPECT_EQ(kappa_minibatch(0.025, 1, 10, 4000, 1, 1.0, 0.5, rho), kappa_basic(0.025, 1, 10, 4000, 1.0, 0.5, rho));
  // xi = 1 and xi = 2: max{xi, xi^2} = 1 and 4.
  EXPECT_NEAR(kappa_basic(0.025, 1, 10, 4000, 1.0, 2.0, rho) / kappa_basic(0.025, 1, 10, 4000, 1.0, 1.0, rho), 4.0,
              1e-12);
}

TEST(EpochsNeeded, ReferenceValues) {
  EXPECT_EQ(epochs_needed(0.5, 1, 0.01), 8u);
  EXPECT_EQ(epochs_needed(0.9, 1, 0.2), 22u);
  EXPECT_EQ(epochs_needed(0.5, 0.004, 0.01), 0u);
  EXPECT_EQ(epochs_needed_formula(0.5, 1, 0.01), 8u);
  EXPECT_THROW(epochs_needed(1.0, 1, 0.01), NoConvergence);
  EXPECT_THROW(epochs_needed(0.0, 1, 0.01), std::invalid_argument);
}

TEST(EpochsNeeded, MinimalAgainstPowerOracle) {
  SeededRng rng(5);
  for (int k = 0; k < 2000; ++k) {
    const double rho = 0.01 + 0.98 * rng.uniform();
    const double phi0 = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
    const double eps = std::pow(10.0, -8.0 + 7.0 * rng.uniform());
    const auto t = epochs_needed(rho, phi0, eps);
    EXPECT_EQ(t, power_oracle(rho, phi0, eps));
    EXPECT_LE(std::pow(rho, static_cast<double>(t)) * phi0, eps / 2.0);
    if (t >= 1) EXPECT_GT(std::pow(rho, static_cast<double>(t - 1)) * phi0, eps / 2.0);
  }
}

TEST(GradientBudget, ReferenceValues) {
  const auto b = gradient_budget(100, 10, 1, 8);
  EXPECT_EQ(b.exact, 1664u);
  EXPECT_EQ(b.asymptotic, 1680u);
  EXPECT_EQ(gradient_budget(1, 10, 1, 8).exact, 80u);
  EXPECT_EQ(gradient_budget(100, 10, 2, 8).exact - 80u, 2 * (1664u - 80u));
}

TEST(Formulas, MatchLongDoubleOracle) {
  SeededRng rng(6);
  for (int k = 0; k < 1000; ++k) {
    const Tuple t = sample_feasible(rng);
    const double rb = rho_basic(t.eta, t.L, t.gamma, t.K, t.s);
    const double rm = rho_minibatch(t.eta, t.L, t.gamma, t.K, t.s, t.q);
    EXPECT_NEAR(rb, static_cast<double>(oracle_rho(t.eta, t.L, t.gamma, t.K, t.s, 1, 1)), 1e-12);
    EXPECT_NEAR(rm, static_cast<double>(oracle_rho(t.eta, t.L, t.gamma, t.K, t.s, t.q, 1)), 1e-12);
    const std::size_t p = 8, blk = 4;
    const double ec = t.eta / 2.0;
    if (1.0 - 4.0 * t.L * ec * 2.0 > 0.0) {
      EXPECT_NEAR(rho_coordinate(ec, t.L, t.gamma, t.K, t.s, p, blk),
                  static_cast<double>(oracle_rho(ec, t.L, t.gamma, t.K, t.s, 1, 2)), 1e-12);
    }
    const double zeta = 10.0 * rng.uniform(), xi = 3.0 * rng.uniform();
    EXPECT_NEAR(kappa_basic(t.eta, t.L, t.s, t.K, zeta, xi, rb),
                static_cast<double>(oracle_kappa(t.eta, t.L, t.s, t.K, 1, 1, zeta, xi, rb)), 1e-12);
    const double phi0 = 10.0 * rng.uniform();
    EXPECT_EQ(epochs_needed(rb, phi0, 1e-4), power_oracle(rb, phi0, 1e-4));
    const std::uint64_t T = 1 + rng.uniform_index(50);
    EXPECT_EQ(gradient_budget(t.K, t.s, t.q, T).exact, T * (t.s + 2 * t.q * (t.K - 1)));
  }
}

TEST(Feasibility, ReferenceValues) {
  TheoryParams params;
  params.theta = 0.5;
  EpochConfig cfg;
  cfg.s = 1;
  cfg.K = 100;
  cfg.eta = 0.01;
  EXPECT_NEAR(feasibility_check(params, cfg).eta_max_theta, 0.1, 1e-15);

  cfg.eta = 0.3;
  const auto rep = feasibility_check(params, cfg);
  EXPECT_FALSE(rep.feasible);
  EXPECT_FALSE(rep.c1.pass);
  EXPECT_EQ(rep.reason.rfind("C1", 0), 0u);
  EXPECT_TRUE(std::isnan(rep.rho));
}

TEST(Feasibility, ZeroXiPassesC3) {
  TheoryParams params;
  params.gamma = 0.1;
  params.xi = 0.0;
  params.zeta = 100.0;
  params.eps = 1e-12;
  EpochConfig cfg;
  cfg.eta = 0.025;
  cfg.s = 10;
  cfg.K = 4000;
  const auto rep = feasibility_check(params, cfg);
  EXPECT_EQ(rep.kappa, 0.0);
  EXPECT_TRUE(rep.c3.pass);
  EXPECT_TRUE(rep.feasible) << rep.reason;
  EXPECT_EQ(rep.grads_per_epoch, 10u + 2u * 3999u);
}

TEST(Feasibility, AgreesWithDirectInequalities) {
  SeededRng rng(7);
  int feasible = 0;
  for (int k = 0; k < 1000; ++k) {
    TheoryParams params;
    params.L = 1.0 + 4.0 * rng.uniform();
    params.gamma = params.L * (0.01 + 0.99 * rng.uniform());
    params.xi = rng.uniform();
    params.zeta = 5.0 * rng.uniform();
    params.eps = std::pow(10.0, -4.0 + 3.0 * rng.uniform());
    params.phi0 = 1.0;
    EpochConfig cfg;
    cfg.s = 1 + rng.uniform_index(50);
    cfg.q = 1 + rng.uniform_index(4);
    cfg.eta = cfg.q / (4.0 * params.L) * 1.2 * rng.uniform();
    cfg.K = 1 + rng.uniform_index(200000);
    const auto rep = feasibility_check(params, cfg);

    const long double L = params.L, g = params.gamma, eta = cfg.eta, q = cfg.q, s = cfg.s, K = cfg.K;
    const bool c1 = 4 * L * eta < q && eta <= q * s / (4 * L * (3 * s + 2 * q));
    bool c2 = false, c3 = false;
    if (4 * L * eta < q) {
      c2 = K > 2 * q / (g * eta * (q - 4 * L * eta));
      const long double rho = oracle_rho(eta, L, g, K, s, q, 1);
      if (rho > 0 && rho < 1) c3 = oracle_kappa(eta, L, s, K, q, 1, params.zeta, params.xi, rho) <= params.eps / 2.0L;
    }
    EXPECT_EQ(rep.c1.pass, c1);
    EXPECT_EQ(rep.c2.pass, c2);
    EXPECT_EQ(rep.c3.pass, c3);
    EXPECT_EQ(rep.feasible, c1 && c2 && c3);
    if (rep.feasible) {
      ++feasible;
      EXPECT_GT(rep.rho, 0.0);
      EXPECT_LT(rep.rho, 1.0);
    }
  }
  EXPECT_GT(feasible, 20);
}

TEST(Feasibility, CoordinateVariant) {
  TheoryParams params;
  params.gamma = 0.1;
  params.p = 4;
  EpochConfig cfg;
  cfg.eta = 0.0125;
  cfg.s = 10;
  cfg.K = 8000;
  cfg.b = 2;
  const auto rep = feasibility_check(params, cfg);
  EXPECT_EQ(rep.variant, "coordinate");
  EXPECT_NEAR(rep.rho, rho_coordinate(0.0125, 1, 0.1, 8000, 10, 4, 2), 1e-15);
  cfg.eta = 0.2;
  EXPECT_EQ(feasibility_check(params, cfg).c1.detail, "η ≥ b/(4Lp)");
}

TEST(TheoryParams, Validation) {
  TheoryParams params;
  params.gamma = 2.0;
  EXPECT_THROW(params.validate(), std::invalid_argument);
  params = TheoryParams{};
  params.theta = 1.0;
  EXPECT_THROW(params.validate(), std::invalid_argument);
  params = TheoryParams{};
  params.eps = 0.0;
  EXPECT_THROW(params.validate(), std::invalid_argument);
}
