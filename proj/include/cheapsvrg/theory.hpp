#ifndef CHEAPSVRG_THEORY_HPP
#define CHEAPSVRG_THEORY_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "cheapsvrg/optimizers.hpp"

namespace cheapsvrg::theory {

/// A step size breaks the stability requirement (a denominator of rho or
/// kappa is not positive).
class InfeasibleStep : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// rho >= 1: the bound promises no contraction.
class NoConvergence : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TheoryParams {
  double L = 1.0;
  double gamma = 1.0;
  double xi = 0.0;    ///< bound on component gradient norms
  double zeta = 0.0;  ///< bound on per-epoch summed distance to w*
  double theta = 0.5;
  double eps = 1e-3;
  double phi0 = 1.0;  ///< F(w~_0) - F(w*)
  std::size_t p = 0;  ///< dimension; 0 when coordinate sampling is unused

  /// Throws std::invalid_argument unless L >= gamma > 0, 0 < theta < 1,
  /// eps > 0, xi, zeta, phi0 >= 0.
  void validate() const;
};

/// 1/(eta (1 - 4 L eta) K gamma) + 4 L eta (1 + 1/s) / (1 - 4 L eta).
double rho_basic(double eta, double L, double gamma, std::size_t K, std::size_t s);
/// q/(eta (q - 4 L eta) K gamma) + 4 L eta (s + q) / ((q - 4 L eta) s).
double rho_minibatch(double eta, double L, double gamma, std::size_t K, std::size_t s, std::size_t q);
/// 1/(eta (1 - 4 L eta r) K gamma) + 4 L eta (r + 1/s) / (1 - 4 L eta r), r = p/b.
double rho_coordinate(double eta, double L, double gamma, std::size_t K, std::size_t s,
                      std::size_t p, std::size_t b);

/// 1/(1 - 4 L eta) (2 eta/s + zeta/K) max{xi, xi^2} / (1 - rho).
double kappa_basic(double eta, double L, std::size_t s, std::size_t K, double zeta, double xi,
                   double rho);
/// Leading factor q/(q - 4 L eta).
double kappa_minibatch(double eta, double L, std::size_t s, std::size_t K, std::size_t q,
                       double zeta, double xi, double rho);
/// Leading factor 1/(1 - 4 L eta p/b).
double kappa_coordinate(double eta, double L, std::size_t s, std::size_t K, std::size_t p,
                        std::size_t b, double zeta, double xi, double rho);

/// Smallest T >= 0 with rho^T phi0 <= eps/2. Throws NoConvergence for
/// rho >= 1 and std::invalid_argument for rho <= 0, phi0 < 0 or eps <= 0.
std::uint64_t epochs_needed(double rho, double phi0, double eps);
/// ceil(log(2 phi0/eps) / log(1/rho)), clamped at 0.
std::uint64_t epochs_needed_formula(double rho, double phi0, double eps);

struct GradientBudget {
  std::uint64_t exact;       ///< T (s + 2q(K - 1))
  std::uint64_t asymptotic;  ///< T (2qK + s)
};
GradientBudget gradient_budget(std::size_t K, std::size_t s, std::size_t q, std::size_t T);

struct ConditionVerdict {
  bool pass = false;
  std::string detail;
};

struct BoundReport {
  std::string variant;  ///< "basic", "minibatch" or "coordinate"
  double rho = 0.0;     ///< NaN when the stability requirement fails
  double kappa = 0.0;   ///< NaN unless 0 < rho < 1
  double eta_max = 0.0;         ///< C1 bound
  double eta_stability = 0.0;   ///< strict bound q/(4L) (b/(4Lp) for blocks)
  double eta_max_theta = 0.0;  ///< 1/(4L((1 + theta) + 1/s))
  std::uint64_t K_min = 0;         ///< smallest K meeting C2
  std::uint64_t K_min_theta = 0;  ///< smallest K > 1/((1 - theta) eta (1 - 4 L eta) gamma)
  std::uint64_t T_min = 0;         ///< epochs_needed when 0 < rho < 1
  std::uint64_t T_formula = 0;
  std::uint64_t grads_per_epoch = 0;
  std::uint64_t total_grads = 0;      ///< T_min epochs, exact count
  std::uint64_t total_grads_asymptotic = 0;
  ConditionVerdict c1, c2, c3;
  bool theta_eta_ok = false;
  bool theta_K_ok = false;
  bool stable = false;
  bool feasible = false;
  std::string reason;  ///< first violated condition, empty when feasible
};

/// Evaluates C1 (step size), C2 (inner length) and C3 (kappa <= eps/2) for
/// the variant implied by cfg: coordinate blocks when params.p > 0 and
/// cfg.block(p) < p, otherwise mini-batch (basic when q = 1). Never throws
/// for infeasible inputs; the outcome is in the report.
BoundReport feasibility_check(const TheoryParams& params, const EpochConfig& cfg);

}  // namespace cheapsvrg::theory

#endif  // CHEAPSVRG_THEORY_HPP
