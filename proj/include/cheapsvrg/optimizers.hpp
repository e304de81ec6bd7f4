#ifndef CHEAPSVRG_OPTIMIZERS_HPP
#define CHEAPSVRG_OPTIMIZERS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheapsvrg/numerics.hpp"
#include "cheapsvrg/objectives.hpp"

namespace cheapsvrg {

/// Knobs shared by every epoch-based method.
struct EpochConfig {
  double eta = 0.0;       ///< constant step size
  std::size_t s = 1;      ///< surrogate subset size, 0..n (0 drops the anchor correction)
  std::size_t q = 1;      ///< inner mini-batch size
  std::size_t b = 0;      ///< coordinate block size; 0 means all p coordinates
  std::size_t K = 2;      ///< points averaged per epoch (K - 1 inner updates)
  std::size_t T = 1;      ///< epochs
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument if any knob is out of range for (n, p).
  void validate(std::size_t n, std::size_t p) const;
  std::size_t block(std::size_t p) const { return b == 0 ? p : b; }
};

struct TracePoint {
  std::size_t epoch = 0;
  double objective = 0.0;
  std::optional<double> gap;       ///< F(w~_t) - F(w*) when a reference is known
  std::optional<double> distance;  ///< ||w~_t - w*||_2 when a reference is known
  std::uint64_t gradients = 0;     ///< cumulative atomic gradient evaluations
  double passes = 0.0;             ///< gradients / n
};

struct Trace {
  std::vector<TracePoint> points;  ///< index 0 is the starting point
  Vector final_iterate;
  bool diverged = false;  ///< when set, the last point is where divergence was detected

  /// Diagnostics (RunOptions::record_diagnostics): per epoch, sum over the
  /// K averaged points of ||w_j - w*||, and the largest component gradient
  /// norm seen at any visited point.
  std::vector<double> distance_sums;
  double max_component_gradient_norm = 0.0;

  /// All K averaged points of every epoch (RunOptions::record_inner_iterates).
  std::vector<std::vector<Vector>> inner_iterates;
};

struct RunOptions {
  std::optional<Vector> reference;  ///< w*, enables gap and distance columns
  bool record_diagnostics = false;  ///< needs `reference`
  bool record_inner_iterates = false;
};

/// Thrown when an iterate becomes non-finite or the objective exceeds
/// 1e12 * max(F(w~_0), 1). Carries the trace up to that point.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, Trace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trace& partial() const { return partial_; }

 private:
  Trace partial_;
};

/// Component-gradient access with atomic-evaluation accounting: every
/// evaluation of a single grad f_i (full or coordinate-restricted) counts 1.
class GradientOracle {
 public:
  GradientOracle(const Objective& obj, const Dataset& data) : obj_(obj), data_(data) {}

  const Objective& objective() const { return obj_; }
  const Dataset& data() const { return data_; }
  std::uint64_t count() const { return count_; }

  Vector component(std::size_t i, const Vector& w);
  Vector component_coords(std::size_t i, const Vector& w, const IndexSet& coords);
  Vector batch(const IndexSet& batch, const Vector& w);
  Vector full(const Vector& w);

 private:
  const Objective& obj_;
  const Dataset& data_;
  std::uint64_t count_ = 0;
};

/// The vectors an inner step combines.
struct DirectionContext {
  const Vector& anchor;     ///< w~
  const Vector& surrogate;  ///< mu~_S
  const Vector& current;    ///< w_{k-1}
};

/// mu~_S = (1/s) sum_{i in S} grad f_i(anchor); charges s.
Vector surrogate_gradient(GradientOracle& oracle, const IndexSet& subset, const Vector& anchor);

/// grad f_i(w_{k-1}) - grad f_i(w~) + mu~_S; charges 2.
Vector cheap_direction(GradientOracle& oracle, const DirectionContext& ctx, std::size_t i);

/// grad f_Q(w_{k-1}) - grad f_Q(w~) + mu~_S with batch means; charges 2|Q|.
Vector minibatch_direction(GradientOracle& oracle, const DirectionContext& ctx, const IndexSet& batch);

/// (p/b) (grad_B f_i(w_{k-1}) - grad_B f_i(w~) + mu~_S restricted to B);
/// zero off B. Charges 2. Throws std::invalid_argument if |B| != b.
Vector coordinate_direction(GradientOracle& oracle, const DirectionContext& ctx, std::size_t i,
                            const IndexSet& block, std::size_t b);

// Epoch methods. Each run draws from three streams derived from cfg.seed:
// subset stream (S_t), index stream (i_k or Q_k) and coordinate stream (B_k),
// so the methods coincide under their reductions for equal seeds.

Trace run_cheap_svrg(const Objective& obj, const Dataset& data, const Vector& w0,
                     const EpochConfig& cfg, const RunOptions& opts = {});
/// Inner steps use |Q_k| = cfg.q.
Trace run_minibatch(const Objective& obj, const Dataset& data, const Vector& w0,
                    const EpochConfig& cfg, const RunOptions& opts = {});
/// Inner steps update a uniform block of cfg.block(p) coordinates.
Trace run_cheaper_svrg(const Objective& obj, const Dataset& data, const Vector& w0,
                       const EpochConfig& cfg, const RunOptions& opts = {});
/// Anchor gradient is the full gradient (n evaluations); cfg.s is ignored.
Trace run_svrg(const Objective& obj, const Dataset& data, const Vector& w0,
               const EpochConfig& cfg, const RunOptions& opts = {});

/// Plain SGD with eta_k = c / (L k). Snapshots every n steps and after the
/// last step.
Trace run_sgd(const Objective& obj, const Dataset& data, const Vector& w0, std::size_t steps,
              double c, double L, std::uint64_t seed, const RunOptions& opts = {});

/// Seeds of the three per-run streams.
struct StreamSeeds {
  std::uint64_t subset;
  std::uint64_t index;
  std::uint64_t coordinate;
};
StreamSeeds stream_seeds(std::uint64_t seed);

}  // namespace cheapsvrg

#endif  // CHEAPSVRG_OPTIMIZERS_HPP
