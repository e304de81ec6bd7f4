#include "cheapsvrg/theory.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cheapsvrg::theory {

void TheoryParams::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(std::string("TheoryParams: ") + msg); };
  if (!(gamma > 0.0)) fail("gamma must be > 0");
  if (!(L >= gamma)) fail("L must be >= gamma");
  if (!(theta > 0.0 && theta < 1.0)) fail("theta must lie in (0, 1)");
  if (!(eps > 0.0)) fail("eps must be > 0");
  if (!(xi >= 0.0) || !(zeta >= 0.0) || !(phi0 >= 0.0)) fail("xi, zeta, phi0 must be >= 0");
}

namespace {

void require_counts(std::size_t K, std::size_t s) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (s < 1) throw std::invalid_argument("s must be >= 1");
}

double max_xi(double xi) { return std::max(xi, xi * xi); }

std::uint64_t smallest_integer_above(double bound) {
  if (!(bound >= 0.0)) return 0;
  if (bound >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::floor(bound)) + 1;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double rho_basic(double eta, double L, double gamma, std::size_t K, std::size_t s) {
  require_counts(K, s);
  const double slack = 1.0 - 4.0 * L * eta;
  if (!(slack > 0.0)) throw InfeasibleStep("1 - 4 L eta <= 0");
  return 1.0 / (eta * slack * static_cast<double>(K) * gamma) +
         4.0 * L * eta * (1.0 + 1.0 / static_cast<double>(s)) / slack;
}

double rho_minibatch(double eta, double L, double gamma, std::size_t K, std::size_t s, std::size_t q) {
  require_counts(K, s);
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  const double qd = static_cast<double>(q);
  const double slack = qd - 4.0 * L * eta;
  if (!(slack > 0.0)) throw InfeasibleStep("q - 4 L eta <= 0 (eta >= q/(4L))");
  return qd / (eta * slack * static_cast<double>(K) * gamma) +
         4.0 * L * eta * (qd * (1.0 / qd + 1.0 / static_cast<double>(s))) / slack;
}

double rho_coordinate(double eta, double L, double gamma, std::size_t K, std::size_t s,
                      std::size_t p, std::size_t b) {
  require_counts(K, s);
  if (b < 1 || b > p) throw std::invalid_argument("need 1 <= b <= p");
  const double r = static_cast<double>(p) / static_cast<double>(b);
  const double slack = 1.0 - 4.0 * L * eta * r;
  if (!(slack > 0.0)) throw InfeasibleStep("1 - 4 L eta p/b <= 0 (eta >= b/(4Lp))");
  return 1.0 / (eta * slack * static_cast<double>(K) * gamma) +
         4.0 * L * eta * (r + 1.0 / static_cast<double>(s)) / slack;
}

namespace {

double kappa_with_factor(double factor, double eta, std::size_t s, std::size_t K, double zeta,
                         double xi, double rho) {
  require_counts(K, s);
  if (!(rho < 1.0)) throw NoConvergence("rho >= 1");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be > 0");
  return factor * (2.0 * eta / static_cast<double>(s) + zeta / static_cast<double>(K)) *
         max_xi(xi) / (1.0 - rho);
}

}  // namespace

double kappa_basic(double eta, double L, std::size_t s, std::size_t K, double zeta, double xi,
                   double rho) {
  const double slack = 1.0 - 4.0 * L * eta;
  if (!(slack > 0.0)) throw InfeasibleStep("1 - 4 L eta <= 0");
  return kappa_with_factor(1.0 / slack, eta, s, K, zeta, xi, rho);
}

double kappa_minibatch(double eta, double L, std::size_t s, std::size_t K, std::size_t q,
                       double zeta, double xi, double rho) {
  const double qd = static_cast<double>(q);
  const double slack = qd - 4.0 * L * eta;
  if (q < 1 || !(slack > 0.0)) throw InfeasibleStep("q - 4 L eta <= 0");
  return kappa_with_factor(qd / slack, eta, s, K, zeta, xi, rho);
}

double kappa_coordinate(double eta, double L, std::size_t s, std::size_t K, std::size_t p,
                        std::size_t b, double zeta, double xi, double rho) {
  if (b < 1 || b > p) throw std::invalid_argument("need 1 <= b <= p");
  const double slack = 1.0 - 4.0 * L * eta * static_cast<double>(p) / static_cast<double>(b);
  if (!(slack > 0.0)) throw InfeasibleStep("1 - 4 L eta p/b <= 0");
  return kappa_with_factor(1.0 / slack, eta, s, K, zeta, xi, rho);
}

std::uint64_t epochs_needed_formula(double rho, double phi0, double eps) {
  if (!(rho < 1.0)) throw NoConvergence("rho >= 1");
  if (!(rho > 0.0) || !(phi0 >= 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("epochs_needed: need rho > 0, phi0 >= 0, eps > 0");
  }
  if (phi0 <= eps / 2.0) return 0;
  const double t = std::log(2.0 * phi0 / eps) / std::log(1.0 / rho);
  return t <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(t));
}

std::uint64_t epochs_needed(double rho, double phi0, double eps) {
  std::uint64_t t = epochs_needed_formula(rho, phi0, eps);
  const double target = eps / 2.0;
  auto gap_after = [&](std::uint64_t epochs) {
    return std::pow(rho, static_cast<double>(epochs)) * phi0;
  };
  while (t > 0 && gap_after(t - 1) <= target) --t;
  while (gap_after(t) > target) ++t;
  return t;
}

GradientBudget gradient_budget(std::size_t K, std::size_t s, std::size_t q, std::size_t T) {
  const std::uint64_t inner = K > 0 ? 2ULL * q * (K - 1) : 0;
  return {static_cast<std::uint64_t>(T) * (s + inner),
          static_cast<std::uint64_t>(T) * (2ULL * q * K + s)};
}

BoundReport feasibility_check(const TheoryParams& params, const EpochConfig& cfg) {
  params.validate();
  BoundReport rep;
  const double L = params.L;
  const double gamma = params.gamma;
  const double eta = cfg.eta;
  const std::size_t s = cfg.s;
  const std::size_t q = cfg.q;
  const std::size_t K = cfg.K;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.rho = nan;
  rep.kappa = nan;

  const bool coordinate = params.p > 0 && cfg.block(params.p) < params.p;
  const std::size_t b = coordinate ? cfg.block(params.p) : 0;
  const double r = coordinate ? static_cast<double>(params.p) / static_cast<double>(b) : 1.0;
  const double qd = coordinate ? 1.0 : static_cast<double>(q);
  const double sd = static_cast<double>(s);
  rep.variant = coordinate ? "coordinate" : (q > 1 ? "minibatch" : "basic");

  // Theta-parameterized bounds for the single-sample method.
  if (s > 0) rep.eta_max_theta = 1.0 / (4.0 * L * ((1.0 + params.theta) + 1.0 / sd));
  rep.theta_eta_ok = s > 0 && eta < rep.eta_max_theta;
  if (1.0 - 4.0 * L * eta > 0.0) {
    rep.K_min_theta =
        smallest_integer_above(1.0 / ((1.0 - params.theta) * eta * (1.0 - 4.0 * L * eta) * gamma));
    rep.theta_K_ok = K >= rep.K_min_theta;
  }

  // Stability: q - 4 L eta > 0, or 1 - 4 L eta p/b > 0 for blocks.
  rep.eta_stability = coordinate ? 1.0 / (4.0 * L * r) : qd / (4.0 * L);
  rep.stable = eta < rep.eta_stability;
  const double slack = coordinate ? 1.0 - 4.0 * L * eta * r : qd - 4.0 * L * eta;

  // C1: second term of rho at most 1/2.
  if (s > 0) {
    rep.eta_max = coordinate ? 1.0 / (4.0 * L * (3.0 * r + 2.0 / sd))
                             : qd * sd / (4.0 * L * (3.0 * sd + 2.0 * qd));
  }
  if (s == 0) {
    rep.c1 = {false, "s = 0: surrogate-free runs have no contraction bound"};
  } else if (!rep.stable) {
    rep.c1 = {false, coordinate ? "η ≥ b/(4Lp)" : "η ≥ q/(4L)"};
  } else if (eta > rep.eta_max) {
    rep.c1 = {false, "η > " + fmt(rep.eta_max) +
                         (coordinate ? " = 1/(4L(3p/b + 2/s))" : " = qs/(4L(3s + 2q))")};
  } else {
    rep.c1 = {true, "η ≤ " + fmt(rep.eta_max)};
  }

  // C2: first term of rho below 1/2.
  if (rep.stable) {
    rep.K_min = smallest_integer_above(2.0 * qd / (gamma * eta * slack));
    const bool ok = K >= rep.K_min;
    rep.c2 = {ok, (ok ? "K ≥ " : "K < ") + std::to_string(rep.K_min)};
  } else {
    rep.c2 = {false, "undefined: stability requirement fails"};
  }

  const std::size_t inner_cost = coordinate ? 2 : 2 * q;
  rep.grads_per_epoch = s + inner_cost * (K > 0 ? K - 1 : 0);

  if (rep.stable && s > 0) {
    rep.rho = coordinate ? rho_coordinate(eta, L, gamma, K, s, params.p, b)
                         : rho_minibatch(eta, L, gamma, K, s, q);
    if (rep.rho > 0.0 && rep.rho < 1.0) {
      rep.kappa = coordinate
                      ? kappa_coordinate(eta, L, s, K, params.p, b, params.zeta, params.xi, rep.rho)
                      : kappa_minibatch(eta, L, s, K, q, params.zeta, params.xi, rep.rho);
      rep.T_min = epochs_needed(rep.rho, params.phi0, params.eps);
      rep.T_formula = epochs_needed_formula(rep.rho, params.phi0, params.eps);
      rep.total_grads = rep.T_min * rep.grads_per_epoch;
      rep.total_grads_asymptotic =
          rep.T_min * (static_cast<std::uint64_t>(inner_cost) * K + static_cast<std::uint64_t>(s));
    }
  }

  if (std::isnan(rep.kappa)) {
    rep.c3 = {false, "undefined: rho not in (0, 1)"};
  } else {
    const bool ok = rep.kappa <= params.eps / 2.0;
    rep.c3 = {ok, "κ = " + fmt(rep.kappa) + (ok ? " ≤ " : " > ") + fmt(params.eps / 2.0)};
  }

  if (!rep.c1.pass) {
    rep.reason = "C1: " + rep.c1.detail;
  } else if (!rep.c2.pass) {
    rep.reason = "C2: " + rep.c2.detail;
  } else if (!rep.c3.pass) {
    rep.reason = "C3: " + rep.c3.detail;
  }
  rep.feasible = rep.reason.empty();
  return rep;
}

}  // namespace cheapsvrg::theory
