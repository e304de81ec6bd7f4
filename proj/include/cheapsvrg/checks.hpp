#ifndef CHEAPSVRG_CHECKS_HPP
#define CHEAPSVRG_CHECKS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cheapsvrg/optimizers.hpp"

namespace cheapsvrg::checks {

struct CheckResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

using DirectionFn = std::function<Vector(GradientOracle&, const DirectionContext&, std::size_t)>;

struct CheckOptions {
  std::uint64_t seed = 1;
  /// Replaces cheap_direction in the enumeration checks. Empty: the library one.
  DirectionFn direction;
};

/// cheap_direction with its result scaled by `factor` (a mutated step for
/// fault-injection runs).
DirectionFn scaled_direction(double factor);

/// Calls fn on every k-subset of [0, n) in lexicographic order.
void for_each_combination(std::size_t n, std::size_t k, const std::function<void(const IndexSet&)>& fn);

/// Exhaustive average of the inner direction over i_k (n = 10, p = 4, 20
/// random (w, w~, S) triples, both objectives).
CheckResult check_index_unbiasedness(const CheckOptions& opts);
/// Average of mu~_S over all C(8, s) subsets for s = 1..8.
CheckResult check_surrogate_unbiasedness(const CheckOptions& opts);
/// Average over all C(8, q) batches for q = 1..8.
CheckResult check_minibatch_unbiasedness(const CheckOptions& opts);
/// Average over all C(6, b) coordinate blocks for b = 1..6.
CheckResult check_coordinate_unbiasedness(const CheckOptions& opts);
/// minibatch(q=1), cheaper(b=p) vs cheap, and cheap(s=n) vs svrg, every
/// inner iterate over 5 epochs.
CheckResult check_reduction_chain(const CheckOptions& opts);
/// Central differences, h = 1e-6 max(1, |w_j|), 100 probes per objective.
/// Error is |fd - g| / max(1, |g|) per coordinate.
CheckResult check_finite_differences(const CheckOptions& opts);
/// Per-epoch atomic-gradient increments and passes = count / n.
CheckResult check_accounting(const CheckOptions& opts);
/// Noiseless least squares started at w* stays there.
CheckResult check_fixed_point(const CheckOptions& opts);

std::vector<CheckResult> run_all_checks(const CheckOptions& opts);

}  // namespace cheapsvrg::checks

#endif  // CHEAPSVRG_CHECKS_HPP
