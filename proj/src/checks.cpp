#include "cheapsvrg/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cheapsvrg/harness.hpp"

namespace cheapsvrg::checks {

namespace {

constexpr double kExact = 1e-12;

Vector random_vector(std::size_t p, SeededRng& rng, double scale = 1.0) {
  Vector w(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = scale * rng.normal();
  return w;
}

// A noisy least-squares instance and a logistic instance built from its signs.
struct Problems {
  Dataset ls;
  Dataset logistic;
};

Problems make_problems(std::size_t n, std::size_t p, std::uint64_t seed) {
  Instance inst = generate_regression_instance({n, p, 0.5, seed});
  Dataset logistic = inst.data;
  for (Eigen::Index i = 0; i < logistic.targets.size(); ++i) {
    logistic.targets(i) = logistic.targets(i) >= 0.0 ? 1.0 : -1.0;
  }
  return {std::move(inst.data), std::move(logistic)};
}

const Objective kLogistic = Objective::logistic(1e-3);

double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

CheckResult finish(std::string name, double dev, double tol, std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.max_deviation = dev;
  r.tolerance = tol;
  r.pass = dev <= tol;
  r.detail = std::move(detail);
  return r;
}

Vector direction(const CheckOptions& opts, GradientOracle& oracle, const DirectionContext& ctx,
                 std::size_t i) {
  return opts.direction ? opts.direction(oracle, ctx, i) : cheap_direction(oracle, ctx, i);
}

template <typename Fn>
void for_both_objectives(const Problems& probs, Fn&& fn) {
  fn(Objective::least_squares(), probs.ls);
  fn(kLogistic, probs.logistic);
}

}  // namespace

DirectionFn scaled_direction(double factor) {
  return [factor](GradientOracle& oracle, const DirectionContext& ctx, std::size_t i) {
    Vector v = cheap_direction(oracle, ctx, i);
    v *= factor;
    return v;
  };
}

void for_each_combination(std::size_t n, std::size_t k, const std::function<void(const IndexSet&)>& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t j = 0; j < k; ++j) idx[j] = j;
  for (;;) {
    fn(IndexSet(idx, n));
    std::size_t j = k;
    while (j > 0 && idx[j - 1] == n - k + (j - 1)) --j;
    if (j == 0) return;
    ++idx[j - 1];
    for (std::size_t m = j; m < k; ++m) idx[m] = idx[m - 1] + 1;
  }
}

CheckResult check_index_unbiasedness(const CheckOptions& opts) {
  const std::size_t n = 10;
  const std::size_t p = 4;
  const Problems probs = make_problems(n, p, derive_seed(opts.seed, 1, 0));
  SeededRng rng(derive_seed(opts.seed, 1, 1));
  double dev = 0.0;
  for_both_objectives(probs, [&](const Objective& obj, const Dataset& data) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector w = random_vector(p, rng);
      const Vector anchor = random_vector(p, rng);
      const std::size_t s = 1 + rng.uniform_index(n);
      const IndexSet subset = sample_subset(n, s, rng);
      GradientOracle oracle(obj, data);
      const Vector mu = surrogate_gradient(oracle, subset, anchor);
      const DirectionContext ctx{anchor, mu, w};
      Vector sum = Vector::Zero(static_cast<Eigen::Index>(p));
      for (std::size_t i = 0; i < n; ++i) sum += direction(opts, oracle, ctx, i);
      const Vector expected = full_gradient(obj, data, w) - full_gradient(obj, data, anchor) + mu;
      dev = std::max(dev, max_abs_diff(sum / static_cast<double>(n), expected));
    }
  });
  return finish("index_unbiasedness", dev, kExact, "n=10 p=4, 20 triples per objective");
}

CheckResult check_surrogate_unbiasedness(const CheckOptions& opts) {
  const std::size_t n = 8;
  const std::size_t p = 3;
  const Problems probs = make_problems(n, p, derive_seed(opts.seed, 2, 0));
  SeededRng rng(derive_seed(opts.seed, 2, 1));
  double dev = 0.0;
  for_both_objectives(probs, [&](const Objective& obj, const Dataset& data) {
    const Vector anchor = random_vector(p, rng);
    const Vector expected = full_gradient(obj, data, anchor);
    for (std::size_t s = 1; s <= n; ++s) {
      GradientOracle oracle(obj, data);
      Vector sum = Vector::Zero(static_cast<Eigen::Index>(p));
      std::size_t count = 0;
      for_each_combination(n, s, [&](const IndexSet& subset) {
        sum += surrogate_gradient(oracle, subset, anchor);
        ++count;
      });
      dev = std::max(dev, max_abs_diff(sum / static_cast<double>(count), expected));
    }
  });
  return finish("surrogate_unbiasedness", dev, kExact, "n=8, s=1..8, all subsets");
}

CheckResult check_minibatch_unbiasedness(const CheckOptions& opts) {
  const std::size_t n = 8;
  const std::size_t p = 3;
  const Problems probs = make_problems(n, p, derive_seed(opts.seed, 3, 0));
  SeededRng rng(derive_seed(opts.seed, 3, 1));
  double dev = 0.0;
  for_both_objectives(probs, [&](const Objective& obj, const Dataset& data) {
    const Vector w = random_vector(p, rng);
    const Vector anchor = random_vector(p, rng);
    GradientOracle oracle(obj, data);
    const Vector mu = surrogate_gradient(oracle, sample_subset(n, 3, rng), anchor);
    const DirectionContext ctx{anchor, mu, w};
    const Vector expected = full_gradient(obj, data, w) - full_gradient(obj, data, anchor) + mu;
    for (std::size_t q = 1; q <= n; ++q) {
      Vector sum = Vector::Zero(static_cast<Eigen::Index>(p));
      std::size_t count = 0;
      for_each_combination(n, q, [&](const IndexSet& batch) {
        sum += minibatch_direction(oracle, ctx, batch);
        ++count;
      });
      dev = std::max(dev, max_abs_diff(sum / static_cast<double>(count), expected));
    }
  });
  return finish("minibatch_unbiasedness", dev, kExact, "n=8, q=1..8, all batches");
}

CheckResult check_coordinate_unbiasedness(const CheckOptions& opts) {
  const std::size_t n = 7;
  const std::size_t p = 6;
  const Problems probs = make_problems(n, p, derive_seed(opts.seed, 4, 0));
  SeededRng rng(derive_seed(opts.seed, 4, 1));
  double dev = 0.0;
  for_both_objectives(probs, [&](const Objective& obj, const Dataset& data) {
    const Vector w = random_vector(p, rng);
    const Vector anchor = random_vector(p, rng);
    GradientOracle oracle(obj, data);
    const Vector mu = surrogate_gradient(oracle, sample_subset(n, 2, rng), anchor);
    const DirectionContext ctx{anchor, mu, w};
    for (std::size_t i = 0; i < n; ++i) {
      const Vector expected = direction(opts, oracle, ctx, i);
      for (std::size_t b = 1; b <= p; ++b) {
        Vector sum = Vector::Zero(static_cast<Eigen::Index>(p));
        std::size_t count = 0;
        for_each_combination(p, b, [&](const IndexSet& block) {
          sum += coordinate_direction(oracle, ctx, i, block, b);
          ++count;
        });
        dev = std::max(dev, max_abs_diff(sum / static_cast<double>(count), expected));
      }
    }
  });
  return finish("coordinate_unbiasedness", dev, kExact, "p=6, b=1..6, all blocks, every i");
}

namespace {

double iterate_distance(const Trace& a, const Trace& b) {
  if (a.inner_iterates.size() != b.inner_iterates.size()) return HUGE_VAL;
  double dev = 0.0;
  for (std::size_t t = 0; t < a.inner_iterates.size(); ++t) {
    if (a.inner_iterates[t].size() != b.inner_iterates[t].size()) return HUGE_VAL;
    for (std::size_t k = 0; k < a.inner_iterates[t].size(); ++k) {
      dev = std::max(dev, max_abs_diff(a.inner_iterates[t][k], b.inner_iterates[t][k]));
    }
  }
  return std::max(dev, max_abs_diff(a.final_iterate, b.final_iterate));
}

}  // namespace

CheckResult check_reduction_chain(const CheckOptions& opts) {
  const Problems probs = make_problems(12, 4, derive_seed(opts.seed, 5, 0));
  const Dataset& data = probs.ls;
  const Objective obj = Objective::least_squares();
  const double L = estimate_constants(obj, data).L_full;
  RunOptions ro;
  ro.record_inner_iterates = true;
  const Vector w0 = Vector::Zero(4);

  EpochConfig cfg;
  cfg.eta = 0.1 / L;
  cfg.s = 5;
  cfg.K = 20;
  cfg.T = 5;
  cfg.seed = derive_seed(opts.seed, 5, 1);
  const Trace cheap = run_cheap_svrg(obj, data, w0, cfg, ro);
  double dev = iterate_distance(run_minibatch(obj, data, w0, cfg, ro), cheap);
  EpochConfig full_block = cfg;
  full_block.b = 4;
  dev = std::max(dev, iterate_distance(run_cheaper_svrg(obj, data, w0, full_block, ro), cheap));
  EpochConfig all = cfg;
  all.s = data.samples();
  dev = std::max(dev, iterate_distance(run_svrg(obj, data, w0, cfg, ro),
                                       run_cheap_svrg(obj, data, w0, all, ro)));
  return finish("reduction_chain", dev, 1e-15, "every inner iterate, 5 epochs");
}

CheckResult check_finite_differences(const CheckOptions& opts) {
  const std::size_t n = 15;
  const std::size_t p = 5;
  const Problems probs = make_problems(n, p, derive_seed(opts.seed, 6, 0));
  SeededRng rng(derive_seed(opts.seed, 6, 1));
  double dev = 0.0;
  for_both_objectives(probs, [&](const Objective& obj, const Dataset& data) {
    for (int probe = 0; probe < 100; ++probe) {
      const auto i = static_cast<std::size_t>(rng.uniform_index(n));
      const Vector w = random_vector(p, rng);
      const Vector g = component_gradient(obj, data, i, w);
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(w(j)));
        Vector up = w;
        Vector down = w;
        up(j) += h;
        down(j) -= h;
        const double fd = (component_value(obj, data, i, up) - component_value(obj, data, i, down)) /
                          (up(j) - down(j));
        dev = std::max(dev, std::abs(fd - g(j)) / std::max(1.0, std::abs(g(j))));
      }
    }
  });
  return finish("finite_differences", dev, 1e-5, "100 probes per objective");
}

CheckResult check_accounting(const CheckOptions& opts) {
  const std::size_t n = 24;
  const std::size_t p = 4;
  const Problems probs = make_problems(n, p, derive_seed(opts.seed, 7, 0));
  const Objective obj = Objective::least_squares();
  const Vector w0 = Vector::Zero(static_cast<Eigen::Index>(p));
  const double L = estimate_constants(obj, probs.ls).L_full;

  EpochConfig cfg;
  cfg.eta = 0.01 / L;
  cfg.s = 10;
  cfg.K = 50;
  cfg.T = 4;
  cfg.seed = opts.seed;
  std::ostringstream detail;
  double dev = 0.0;
  auto verify = [&](const char* name, const Trace& trace, std::uint64_t per_epoch) {
    for (std::size_t t = 0; t < trace.points.size(); ++t) {
      const auto& pt = trace.points[t];
      const std::uint64_t expected = per_epoch * t;
      dev = std::max(dev, std::abs(static_cast<double>(pt.gradients) - static_cast<double>(expected)));
      dev = std::max(dev, std::abs(pt.passes - static_cast<double>(expected) / static_cast<double>(n)));
    }
    detail << name << '=' << trace.points.back().gradients << ' ';
  };
  verify("cheap", run_cheap_svrg(obj, probs.ls, w0, cfg), 10 + 2 * 49);
  EpochConfig mb = cfg;
  mb.q = 3;
  verify("minibatch", run_minibatch(obj, probs.ls, w0, mb), 10 + 2 * 3 * 49);
  verify("svrg", run_svrg(obj, probs.ls, w0, cfg), n + 2 * 49);
  EpochConfig blk = cfg;
  blk.b = 2;
  verify("cheaper", run_cheaper_svrg(obj, probs.ls, w0, blk), 10 + 2 * 49);
  return finish("accounting", dev, 0.0, detail.str());
}

CheckResult check_fixed_point(const CheckOptions& opts) {
  const std::size_t n = 16;
  Instance inst = generate_regression_instance({n, 4, 0.0, derive_seed(opts.seed, 8, 0)});
  const Objective obj = Objective::least_squares();
  const double L = estimate_constants(obj, inst.data).L_full;
  RunOptions ro;
  ro.record_inner_iterates = true;
  double dev = 0.0;
  for (std::size_t s : {std::size_t{1}, std::size_t{4}, n}) {
    EpochConfig cfg;
    cfg.eta = 1.0 / (10.0 * L);
    cfg.s = s;
    cfg.K = 2 * n;
    cfg.T = 10;
    cfg.seed = derive_seed(opts.seed, 8, s);
    const Trace trace = run_cheap_svrg(obj, inst.data, inst.w_star, cfg, ro);
    for (const auto& epoch : trace.inner_iterates) {
      for (const auto& w : epoch) dev = std::max(dev, max_abs_diff(w, inst.w_star));
    }
  }
  return finish("fixed_point", dev, 1e-14, "noiseless, s in {1, sqrt(n), n}, 10 epochs");
}

std::vector<CheckResult> run_all_checks(const CheckOptions& opts) {
  return {check_index_unbiasedness(opts),      check_surrogate_unbiasedness(opts),
          check_minibatch_unbiasedness(opts),  check_coordinate_unbiasedness(opts),
          check_reduction_chain(opts),         check_finite_differences(opts),
          check_accounting(opts),              check_fixed_point(opts)};
}

}  // namespace cheapsvrg::checks
