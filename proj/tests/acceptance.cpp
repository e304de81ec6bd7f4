// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Oracles here are written against the closed forms and do
// not reuse library helpers beyond the operation under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cheapsvrg/harness.hpp"
#include "cheapsvrg/theory.hpp"

using namespace cheapsvrg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const Objective kLs = Objective::least_squares();

// Least squares with f_i = (n/2)(y_i - x_i^T w)^2, written out in plain loops.
struct LsOracle {
  const Dataset& d;

  double residual(std::size_t i, const Vector& w) const {
    double m = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) m += d.features(i, j) * w(j);
    return m - d.targets(i);
  }
  Vector component(std::size_t i, const Vector& w) const {
    const double n = static_cast<double>(d.samples());
    const double r = residual(i, w);
    Vector g(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) g(j) = n * r * d.features(i, j);
    return g;
  }
  // grad F = X^T (X w - y)
  Vector full(const Vector& w) const {
    Vector g = Vector::Zero(w.size());
    for (std::size_t i = 0; i < d.samples(); ++i) {
      const double r = residual(i, w);
      for (Eigen::Index j = 0; j < w.size(); ++j) g(j) += r * d.features(i, j);
    }
    return g;
  }
  Vector subset_mean(const std::vector<std::size_t>& idx, const Vector& w) const {
    Vector g = Vector::Zero(w.size());
    for (std::size_t i : idx) g += component(i, w);
    return g / static_cast<double>(idx.size());
  }
};

// Every k-subset of [0, n) via bitmasks (n <= 20).
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s.push_back(i);
    }
    out.push_back(std::move(s));
  }
  return out;
}

Vector random_vector(std::size_t p, SeededRng& rng) {
  Vector w(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = rng.normal();
  return w;
}

double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

void criterion_index_unbiasedness() {
  const auto start = Clock::now();
  const Instance inst = generate_regression_instance({10, 4, 0.5, 101});
  const LsOracle ref{inst.data};
  GradientOracle oracle(kLs, inst.data);
  SeededRng rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vector w = random_vector(4, rng);
    const Vector anchor = random_vector(4, rng);
    const IndexSet s = sample_subset(10, 1 + rng.uniform_index(10), rng);
    const std::vector<std::size_t> idx(s.begin(), s.end());
    const Vector mu = ref.subset_mean(idx, anchor);
    Vector avg = Vector::Zero(4);
    for (std::size_t i = 0; i < 10; ++i) avg += cheap_direction(oracle, {anchor, mu, w}, i);
    avg /= 10.0;
    worst = std::max(worst, max_abs(avg - (ref.full(w) - ref.full(anchor) + mu)));
  }
  const double t = seconds_since(start);
  report(1, "unbiasedness over i_k", worst <= 1e-12 && t < 1.0,
         fmt("max err %.3g (tol 1e-12)", worst) + fmt(", %.3f s (limit 1 s)", t));
}

void criterion_surrogate_unbiasedness() {
  const Instance inst = generate_regression_instance({8, 3, 0.5, 102});
  const LsOracle ref{inst.data};
  GradientOracle oracle(kLs, inst.data);
  SeededRng rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Vector anchor = random_vector(3, rng);
    const Vector expected = ref.full(anchor);
    for (std::size_t s = 1; s <= 8; ++s) {
      const auto all = subsets(8, s);
      Vector avg = Vector::Zero(3);
      for (const auto& idx : all) avg += surrogate_gradient(oracle, IndexSet(idx, 8), anchor);
      avg /= static_cast<double>(all.size());
      worst = std::max(worst, max_abs(avg - expected));
    }
  }
  report(2, "unbiasedness over S", worst <= 1e-12, fmt("max err %.3g over s = 1..8 (tol 1e-12)", worst));
}

void criterion_expectation_identities() {
  double worst_batch = 0.0, worst_block = 0.0;
  {
    const Instance inst = generate_regression_instance({8, 3, 0.5, 103});
    const LsOracle ref{inst.data};
    GradientOracle oracle(kLs, inst.data);
    SeededRng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector w = random_vector(3, rng), anchor = random_vector(3, rng);
      const Vector mu = ref.subset_mean({0, 3, 5}, anchor);
      const Vector expected = ref.full(w) - ref.full(anchor) + mu;
      for (std::size_t q = 1; q <= 8; ++q) {
        const auto all = subsets(8, q);
        Vector avg = Vector::Zero(3);
        for (const auto& idx : all) avg += minibatch_direction(oracle, {anchor, mu, w}, IndexSet(idx, 8));
        avg /= static_cast<double>(all.size());
        worst_batch = std::max(worst_batch, max_abs(avg - expected));
      }
    }
  }
  {
    const Instance inst = generate_regression_instance({7, 6, 0.5, 104});
    const LsOracle ref{inst.data};
    GradientOracle oracle(kLs, inst.data);
    SeededRng rng(4);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector w = random_vector(6, rng), anchor = random_vector(6, rng);
      const Vector mu = ref.subset_mean({1, 2}, anchor);
      for (std::size_t i = 0; i < 7; ++i) {
        const Vector expected = ref.component(i, w) - ref.component(i, anchor) + mu;
        for (std::size_t b = 1; b <= 6; ++b) {
          const auto all = subsets(6, b);
          Vector avg = Vector::Zero(6);
          for (const auto& idx : all) avg += coordinate_direction(oracle, {anchor, mu, w}, i, IndexSet(idx, 6), b);
          avg /= static_cast<double>(all.size());
          worst_block = std::max(worst_block, max_abs(avg - expected) / std::max(1.0, max_abs(expected)));
        }
      }
    }
  }
  report(3, "mini-batch / block identities", worst_batch <= 1e-12 && worst_block <= 1e-12,
         fmt("batches max err %.3g", worst_batch) + fmt(", blocks max err %.3g (tol 1e-12)", worst_block));
}

double iterate_gap(const Trace& a, const Trace& b) {
  if (a.inner_iterates.size() != b.inner_iterates.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t t = 0; t < a.inner_iterates.size(); ++t) {
    if (a.inner_iterates[t].size() != b.inner_iterates[t].size()) return INFINITY;
    for (std::size_t k = 0; k < a.inner_iterates[t].size(); ++k) {
      worst = std::max(worst, max_abs(a.inner_iterates[t][k] - b.inner_iterates[t][k]));
    }
  }
  return worst;
}

void criterion_reduction_chain() {
  Matrix x(3, 2);
  x << 1, 0, 0, 1, 1, 1;
  Vector y(3);
  y << 1, 1, 2;
  const Dataset toy(x, y);
  const Instance gen = generate_regression_instance({12, 4, 0.3, 105});
  double worst = 0.0;
  for (const Dataset* d : {&toy, &gen.data}) {
    const std::size_t n = d->samples(), p = d->dimension();
    RunOptions ro;
    ro.record_inner_iterates = true;
    EpochConfig cfg;
    cfg.eta = 0.01;
    cfg.s = 2;
    cfg.K = 10;
    cfg.T = 5;
    cfg.seed = 9;
    const Vector w0 = Vector::Zero(static_cast<Eigen::Index>(p));
    const Trace cheap = run_cheap_svrg(kLs, *d, w0, cfg, ro);
    worst = std::max(worst, iterate_gap(run_minibatch(kLs, *d, w0, cfg, ro), cheap));
    EpochConfig full_block = cfg;
    full_block.b = p;
    worst = std::max(worst, iterate_gap(run_cheaper_svrg(kLs, *d, w0, full_block, ro), cheap));
    EpochConfig all = cfg;
    all.s = n;
    worst = std::max(worst, iterate_gap(run_cheap_svrg(kLs, *d, w0, all, ro), run_svrg(kLs, *d, w0, all, ro)));
  }
  report(4, "reduction chain", worst <= 1e-15, fmt("max iterate diff %.3g over 5 epochs (tol 1e-15)", worst));
}

void criterion_finite_differences() {
  const Instance inst = generate_regression_instance({20, 5, 0.5, 106});
  Dataset logistic = inst.data;
  for (Eigen::Index i = 0; i < logistic.targets.size(); ++i) logistic.targets(i) = logistic.targets(i) >= 0 ? 1 : -1;
  const double lambda = 1e-3;
  const double n = 20.0;
  auto ls_value = [&](std::size_t i, const Vector& w) {
    const long double r = static_cast<long double>(inst.data.targets(i)) - inst.data.features.row(i).dot(w);
    return n / 2.0L * r * r;
  };
  auto log_value = [&](std::size_t i, const Vector& w) {
    const long double m = static_cast<long double>(logistic.targets(i)) * logistic.features.row(i).dot(w);
    return std::log1p(std::exp(-m)) + lambda * static_cast<long double>(w.squaredNorm());
  };
  SeededRng rng(6);
  double worst = 0.0;
  auto probe = [&](const Objective& obj, const Dataset& d, const std::function<long double(std::size_t, const Vector&)>& f) {
    for (int k = 0; k < 100; ++k) {
      const std::size_t i = rng.uniform_index(20);
      const Vector w = random_vector(5, rng);
      const Vector g = component_gradient(obj, d, i, w);
      for (Eigen::Index j = 0; j < 5; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(w(j)));
        Vector wp = w, wm = w;
        wp(j) += h;
        wm(j) -= h;
        const double fd = static_cast<double>((f(i, wp) - f(i, wm)) / (wp(j) - wm(j)));
        worst = std::max(worst, std::abs(fd - g(j)) / std::max(1.0, std::abs(g(j))));
      }
    }
  };
  probe(kLs, inst.data, ls_value);
  probe(Objective::logistic(lambda), logistic, log_value);
  report(5, "gradient correctness", worst <= 1e-5, fmt("max rel err %.3g over 200 probes (tol 1e-5)", worst));
}

void criterion_fixed_point() {
  const Instance inst = generate_regression_instance({100, 10, 0.0, 107});
  const double L = step_lipschitz(kLs, inst.data, LipschitzMode::Spectral);
  double worst = 0.0;
  for (std::size_t s : {std::size_t{1}, std::size_t{10}, std::size_t{100}}) {
    EpochConfig cfg;
    cfg.eta = 1.0 / (300.0 * L);
    cfg.s = s;
    cfg.K = 200;
    cfg.T = 10;
    cfg.seed = s;
    RunOptions ro;
    ro.record_inner_iterates = true;
    const Trace t = run_cheap_svrg(kLs, inst.data, inst.w_star, cfg, ro);
    for (const auto& epoch : t.inner_iterates) {
      for (const auto& w : epoch) worst = std::max(worst, max_abs(w - inst.w_star));
    }
    worst = std::max(worst, max_abs(t.final_iterate - inst.w_star));
  }
  report(6, "fixed point at w*", worst <= 1e-14, fmt("max |w - w*| %.3g, s in {1, 10, 100} (tol 1e-14)", worst));
}

struct DeskRun {
  Trace trace;
  double eta = 0.0;
  std::size_t K = 0, s = 0;
};

DeskRun desk_run(const Instance& inst, std::size_t s, bool diagnostics) {
  const double L = step_lipschitz(kLs, inst.data, LipschitzMode::Spectral);
  EpochConfig cfg;
  cfg.eta = 1.0 / (300.0 * L);
  cfg.s = s;
  cfg.K = 400;
  cfg.T = 30;
  cfg.seed = 1;
  RunOptions ro;
  ro.reference = inst.w_star;
  ro.record_diagnostics = diagnostics;
  return {run_algorithm({"", Algorithm::Cheap, cfg, 300.0, cfg.eta, 0}, kLs, inst.data, Vector::Zero(50), L, 1, ro),
          cfg.eta, cfg.K, s};
}

DeskRun criterion_linear_convergence(const Instance& inst) {
  const auto start = Clock::now();
  const DeskRun sqrt_run = desk_run(inst, 15, true);
  const DeskRun one_run = desk_run(inst, 1, false);
  const double t = seconds_since(start);
  auto ratio = [](const Trace& tr) {
    return tr.diverged ? INFINITY : tr.points.back().objective / tr.points.front().objective;
  };
  const double r15 = ratio(sqrt_run.trace), r1 = ratio(one_run.trace);
  report(7, "linear convergence", r15 <= 1e-8 && r1 <= 1e-6 && t < 10.0,
         fmt("F_T/F_0: s=15 %.3g (tol 1e-8)", r15) + fmt(", s=1 %.3g (tol 1e-6)", r1) + fmt(", %.2f s", t));
  return sqrt_run;
}

// Closed forms in long double.
long double o_rho(long double eta, long double L, long double g, long double K, long double s, long double q,
                  long double r) {
  if (r > 1) return 1 / (eta * (1 - 4 * L * eta * r) * K * g) + 4 * L * eta * (r + 1 / s) / (1 - 4 * L * eta * r);
  return q / (eta * (q - 4 * L * eta) * K * g) + 4 * L * eta * (s + q) / ((q - 4 * L * eta) * s);
}

long double o_kappa(long double eta, long double L, long double s, long double K, long double zeta, long double xi,
                    long double rho) {
  return 1 / (1 - 4 * L * eta) * (2 * eta / s + zeta / K) * std::max(xi, xi * xi) / (1 - rho);
}

std::uint64_t o_epochs(long double rho, long double phi0, long double eps) {
  std::uint64_t t = 0;
  for (long double v = phi0; v > eps / 2; v *= rho) ++t;
  return t;
}

void criterion_theory() {
  SeededRng rng(8);
  double worst = 0.0;
  int mismatches = 0, feasible = 0;
  auto rel = [](double a, long double b) {
    return static_cast<double>(std::abs(a - b) / std::max(1.0L, std::abs(b)));
  };
  for (int k = 0; k < 1000; ++k) {
    const double L = 1 + 9 * rng.uniform();
    const double g = L * (0.01 + 0.99 * rng.uniform());
    const std::size_t s = 1 + rng.uniform_index(100), q = 1 + rng.uniform_index(8);
    const std::size_t p = 8, b = 4;
    const double eta_max = std::min(static_cast<double>(q * s) / (4 * L * (3.0 * s + 2.0 * q)),
                                    static_cast<double>(s) / (4 * L * (3.0 * s + 2.0)));
    const double eta = eta_max * (0.01 + 0.98 * rng.uniform());
    const double kmin = std::max(2.0 * q / (g * eta * (q - 4 * L * eta)), 2.0 / (g * eta * (1 - 4 * L * eta)));
    const std::size_t K = static_cast<std::size_t>(std::ceil(kmin * (1.05 + 9 * rng.uniform())));
    const double rb = theory::rho_basic(eta, L, g, K, s);
    worst = std::max(worst, rel(rb, o_rho(eta, L, g, K, s, 1, 1)));
    worst = std::max(worst, rel(theory::rho_minibatch(eta, L, g, K, s, q), o_rho(eta, L, g, K, s, q, 1)));
    const double ec = eta / 2;
    worst = std::max(worst, rel(theory::rho_coordinate(ec, L, g, K, s, p, b), o_rho(ec, L, g, K, s, 1, 2)));
    const double zeta = 10 * rng.uniform(), xi = 3 * rng.uniform();
    worst = std::max(worst, rel(theory::kappa_basic(eta, L, s, K, zeta, xi, rb), o_kappa(eta, L, s, K, zeta, xi, rb)));
    const double phi0 = 10 * rng.uniform(), eps = std::pow(10.0, -6 + 5 * rng.uniform());
    mismatches += theory::epochs_needed(rb, phi0, eps) != o_epochs(rb, phi0, eps);
    const std::uint64_t T = 1 + rng.uniform_index(50);
    mismatches += theory::gradient_budget(K, s, q, T).exact != T * (s + 2 * q * (K - 1));
    mismatches += theory::gradient_budget(K, s, q, T).asymptotic != T * (2 * q * K + s);

    // Feasibility against direct inequalities, on the tuple and a perturbed copy.
    for (double scale : {1.0, 0.5 + 1.5 * rng.uniform()}) {
      theory::TheoryParams params;
      params.L = L;
      params.gamma = g;
      params.xi = xi;
      params.zeta = zeta;
      params.eps = eps;
      EpochConfig cfg;
      cfg.eta = eta * scale;
      cfg.s = s;
      cfg.q = q;
      cfg.K = K;
      const auto rep = theory::feasibility_check(params, cfg);
      const long double e = cfg.eta;
      const bool stable = 4 * L * e < q;
      const bool c1 = stable && e <= static_cast<long double>(q * s) / (4 * L * (3.0L * s + 2.0L * q));
      const bool c2 = stable && K > 2 * q / (g * e * (q - 4 * L * e));
      bool c3 = false;
      if (stable) {
        const long double rho = o_rho(e, L, g, K, s, q, 1);
        if (rho > 0 && rho < 1) {
          const long double kap =
              q / (q - 4 * L * e) * (2 * e / s + static_cast<long double>(zeta) / K) * std::max(xi, xi * xi) / (1 - rho);
          c3 = kap <= eps / 2.0L;
        }
      }
      const bool expect = c1 && c2 && c3;
      mismatches += rep.c1.pass != c1 || rep.c2.pass != c2 || rep.c3.pass != c3 || rep.feasible != expect;
      if (rep.feasible && !(rep.rho > 0 && rep.rho < 1)) ++mismatches;
      feasible += rep.feasible;
    }
  }
  const bool eight = theory::epochs_needed(0.5, 1, 0.01) == 8;
  report(8, "theory formulas", worst <= 1e-12 && mismatches == 0 && eight,
         fmt("max rel err %.3g (tol 1e-12)", worst) + ", " + std::to_string(mismatches) + " mismatches, " +
             std::to_string(feasible) + " feasible tuples, T(0.5, 1, 0.01) = " +
             std::to_string(theory::epochs_needed(0.5, 1, 0.01)));
}

void criterion_accounting() {
  const Instance inst = generate_regression_instance({24, 4, 0.1, 109});
  EpochConfig cfg;
  cfg.eta = 1e-3;
  cfg.s = 10;
  cfg.q = 1;
  cfg.K = 50;
  cfg.T = 4;
  const Trace t = run_cheap_svrg(kLs, inst.data, Vector::Zero(4), cfg);
  const auto g = t.points.back().gradients;
  const double passes = t.points.back().passes;
  report(9, "gradient accounting", g == 432 && passes == 432.0 / 24.0,
         "gradients " + std::to_string(g) + " (expect 432)" + fmt(", passes %.17g", passes) + " (expect 18, n = 24)");
}

AlgorithmSpec planned(const std::string& label, Algorithm algo, std::size_t s, std::uint64_t budget, double perc) {
  AlgorithmSpec a;
  a.label = label;
  a.algo = algo;
  a.cfg.s = algo == Algorithm::Svrg ? 200 : s;
  const auto plan = plan_budget(budget, perc, a.cfg.s, 1, 200, algo);
  a.cfg.K = plan.K;
  a.cfg.T = plan.T;
  return a;
}

void criterion_ordering() {
  const auto start = Clock::now();
  const std::uint64_t budget = 60 * 200;
  StudyConfig cfg;
  cfg.instance = InstanceSpec{200, 50, 0.1, 0};
  cfg.instances = 3;
  cfg.executions = 3;
  cfg.master_seed = 1;
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  cfg.algorithms.push_back(planned("svrg", Algorithm::Svrg, 0, budget, 0.75));
  cfg.algorithms.push_back(planned("cheap_s20", Algorithm::Cheap, 20, budget, 0.75));
  cfg.algorithms.push_back(planned("cheap_s1", Algorithm::Cheap, 1, budget, 0.75));
  AlgorithmSpec sgd;
  sgd.label = "sgd";
  sgd.algo = Algorithm::Sgd;
  sgd.eta_c = 10.0;
  sgd.sgd_steps = budget;
  cfg.algorithms.push_back(sgd);
  cfg.algorithms.push_back(planned("cheap_s20_p90", Algorithm::Cheap, 20, budget, 0.90));
  const StudyResult res = run_study(cfg);

  double common = INFINITY;
  for (const char* label : {"svrg", "cheap_s20", "cheap_s1", "sgd"}) {
    common = std::min(common, res.summary(label).final_passes);
  }
  const double m_svrg = res.median_objective_at("svrg", common);
  const double m_c20 = res.median_objective_at("cheap_s20", common);
  const double m_c1 = res.median_objective_at("cheap_s1", common);
  const double m_sgd = res.median_objective_at("sgd", common);
  const double split = std::min(res.summary("cheap_s20").final_passes, res.summary("cheap_s20_p90").final_passes);
  const double m75 = res.median_objective_at("cheap_s20", split);
  const double m90 = res.median_objective_at("cheap_s20_p90", split);
  const double t = seconds_since(start);
  const bool order = m_svrg <= m_c20 && m_c20 <= m_c1 && m_c1 <= m_sgd;
  const bool perc = m90 > m75;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "medians at %.4g passes: svrg %.5g, cheap s=20 %.5g, cheap s=1 %.5g, sgd %.5g (%s); "
                "perc 0.90 %.5g vs 0.75 %.5g at %.4g passes (%s); %.1f s",
                common, m_svrg, m_c20, m_c1, m_sgd, order ? "ordered" : "not ordered", m90, m75, split,
                perc ? "worse" : "not worse", t);
  report(10, "qualitative ordering", order && perc && t < 60.0, buf);
}

void criterion_contraction(const Instance& inst, const DeskRun& run) {
  const Trace& tr = run.trace;
  const auto c = estimate_constants(kLs, inst.data);
  const double xi = tr.max_component_gradient_norm;
  const double zeta = tr.distance_sums.empty() ? 0.0 : *std::max_element(tr.distance_sums.begin(), tr.distance_sums.end());
  double rho = theory::rho_basic(run.eta, c.L, c.gamma, run.K, run.s);
  double kappa = 0.0;
  if (rho < 1.0) kappa = theory::kappa_basic(run.eta, c.L, run.s, run.K, zeta, xi, rho);
  int violations = 0, epochs = 0;
  double worst = 0.0;
  for (std::size_t t = 1; t < tr.points.size(); ++t) {
    if (!tr.points[t].gap || !tr.points[t - 1].gap) continue;
    ++epochs;
    const double excess = *tr.points[t].gap - (rho * *tr.points[t - 1].gap + kappa + 1e-9);
    if (excess > 0.0) {
      ++violations;
      worst = std::max(worst, excess);
    }
  }
  const bool pass = epochs > 0 && violations <= 0.05 * epochs;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "rho %.4g%s, kappa %.3g (xi %.3g, zeta %.3g); %d/%d epochs violate, worst excess %.3g", rho,
                rho >= 1.0 ? " (>= 1, bound vacuous)" : "", kappa, xi, zeta, violations, epochs, worst);
  report(11, "contraction diagnostic", pass, buf);
}

}  // namespace

int main() {
  try {
    criterion_index_unbiasedness();
    criterion_surrogate_unbiasedness();
    criterion_expectation_identities();
    criterion_reduction_chain();
    criterion_finite_differences();
    criterion_fixed_point();
    const Instance desk = generate_regression_instance({200, 50, 0.0, 1});
    const DeskRun run = criterion_linear_convergence(desk);
    criterion_theory();
    criterion_accounting();
    criterion_ordering();
    criterion_contraction(desk, run);
  } catch (const std::exception& err) {
    std::printf("[FAIL] aborted: %s\n", err.what());
    return 2;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
