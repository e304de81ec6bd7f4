#include "cheapsvrg/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cheapsvrg {

void EpochConfig::validate(std::size_t n, std::size_t p) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("EpochConfig: " + msg); };
  if (!(eta > 0.0) || !std::isfinite(eta)) fail("eta must be positive and finite");
  if (s > n) fail("s = " + std::to_string(s) + " exceeds n = " + std::to_string(n));
  if (q < 1 || q > n) fail("q must lie in [1, n]");
  if (b > p) fail("b = " + std::to_string(b) + " exceeds p = " + std::to_string(p));
  if (K < 1) fail("K must be >= 1");
  if (T < 1) fail("T must be >= 1");
}

StreamSeeds stream_seeds(std::uint64_t seed) {
  return {derive_seed(seed, 0, 1), derive_seed(seed, 0, 2), derive_seed(seed, 0, 3)};
}

Vector GradientOracle::component(std::size_t i, const Vector& w) {
  ++count_;
  return component_gradient(obj_, data_, i, w);
}

Vector GradientOracle::component_coords(std::size_t i, const Vector& w, const IndexSet& coords) {
  ++count_;
  return component_gradient_coords(obj_, data_, i, w, coords);
}

Vector GradientOracle::batch(const IndexSet& batch, const Vector& w) {
  count_ += batch.size();
  return batch_gradient(obj_, data_, batch, w);
}

Vector GradientOracle::full(const Vector& w) {
  count_ += data_.samples();
  return full_gradient(obj_, data_, w);
}

Vector surrogate_gradient(GradientOracle& oracle, const IndexSet& subset, const Vector& anchor) {
  if (subset.empty()) throw std::invalid_argument("surrogate_gradient: empty subset");
  return oracle.batch(subset, anchor);
}

Vector cheap_direction(GradientOracle& oracle, const DirectionContext& ctx, std::size_t i) {
  Vector v = oracle.component(i, ctx.current);
  v -= oracle.component(i, ctx.anchor);
  v += ctx.surrogate;
  return v;
}

Vector minibatch_direction(GradientOracle& oracle, const DirectionContext& ctx, const IndexSet& batch) {
  if (batch.empty()) throw std::invalid_argument("minibatch_direction: empty batch");
  Vector v = oracle.batch(batch, ctx.current);
  v -= oracle.batch(batch, ctx.anchor);
  v += ctx.surrogate;
  return v;
}

Vector coordinate_direction(GradientOracle& oracle, const DirectionContext& ctx, std::size_t i,
                            const IndexSet& block, std::size_t b) {
  if (b == 0 || block.size() != b) {
    throw std::invalid_argument("coordinate_direction: block has " + std::to_string(block.size()) +
                                " coordinates, expected b = " + std::to_string(b));
  }
  const auto p = static_cast<double>(oracle.data().dimension());
  Vector v = oracle.component_coords(i, ctx.current, block);
  v -= oracle.component_coords(i, ctx.anchor, block);
  for (std::size_t j : block) {
    const auto jj = static_cast<Eigen::Index>(j);
    v(jj) += ctx.surrogate(jj);
  }
  const double scale = p / static_cast<double>(b);
  for (std::size_t j : block) v(static_cast<Eigen::Index>(j)) *= scale;
  return v;
}

namespace {

enum class Variant { Cheap, MiniBatch, Cheaper, Svrg };

class TraceRecorder {
 public:
  TraceRecorder(const Objective& obj, const Dataset& data, const RunOptions& opts)
      : obj_(obj), data_(data), opts_(opts) {
    if (opts_.reference && static_cast<std::size_t>(opts_.reference->size()) != data.dimension()) {
      throw std::invalid_argument("reference point has wrong dimension");
    }
    if (opts_.record_diagnostics && !opts_.reference) {
      throw std::invalid_argument("record_diagnostics requires a reference point");
    }
    if (opts_.reference) reference_value_ = objective_value(obj, data, *opts_.reference);
  }

  // Returns the objective at w.
  double record(std::size_t epoch, const Vector& w, std::uint64_t gradients) {
    TracePoint pt;
    pt.epoch = epoch;
    pt.objective = objective_value(obj_, data_, w);
    if (opts_.reference) {
      pt.gap = pt.objective - reference_value_;
      pt.distance = (w - *opts_.reference).norm();
    }
    pt.gradients = gradients;
    pt.passes = static_cast<double>(gradients) / static_cast<double>(data_.samples());
    trace_.points.push_back(pt);
    if (epoch == 0) threshold_ = 1e12 * std::max(std::abs(pt.objective), 1.0);
    return pt.objective;
  }

  bool exceeds_threshold(double value) const { return !std::isfinite(value) || value > threshold_; }

  void observe(const Vector& w) {
    if (!opts_.record_diagnostics) return;
    epoch_distance_ += (w - *opts_.reference).norm();
    for (std::size_t i = 0; i < data_.samples(); ++i) {
      const double g = component_gradient(obj_, data_, i, w).norm();
      trace_.max_component_gradient_norm = std::max(trace_.max_component_gradient_norm, g);
    }
  }

  void close_epoch() {
    if (opts_.record_diagnostics) trace_.distance_sums.push_back(epoch_distance_);
    epoch_distance_ = 0.0;
  }

  [[noreturn]] void diverge(std::size_t epoch, const Vector& w, std::uint64_t gradients,
                            const std::string& why) {
    TracePoint pt;
    pt.epoch = epoch;
    const double value = w.allFinite() ? objective_value(obj_, data_, w) : HUGE_VAL;
    pt.objective = std::isfinite(value) ? value : HUGE_VAL;
    if (opts_.reference) {
      pt.gap = pt.objective - reference_value_;
      pt.distance = w.allFinite() ? (w - *opts_.reference).norm() : HUGE_VAL;
    }
    pt.gradients = gradients;
    pt.passes = static_cast<double>(gradients) / static_cast<double>(data_.samples());
    trace_.points.push_back(pt);
    trace_.diverged = true;
    trace_.final_iterate = w;
    throw DivergenceError("diverged in epoch " + std::to_string(epoch) + ": " + why,
                          std::move(trace_));
  }

  Trace& trace() { return trace_; }

 private:
  const Objective& obj_;
  const Dataset& data_;
  const RunOptions& opts_;
  Trace trace_;
  double reference_value_ = 0.0;
  double threshold_ = HUGE_VAL;
  double epoch_distance_ = 0.0;
};

Trace run_epochs(Variant variant, const Objective& obj, const Dataset& data, const Vector& w0,
                 const EpochConfig& cfg, const RunOptions& opts) {
  validate(obj, data);
  const std::size_t n = data.samples();
  const std::size_t p = data.dimension();
  cfg.validate(n, p);
  if (static_cast<std::size_t>(w0.size()) != p) {
    throw std::invalid_argument("initial point has dimension " + std::to_string(w0.size()) +
                                ", expected " + std::to_string(p));
  }
  const std::size_t b = cfg.block(p);
  const bool anchored = variant == Variant::Svrg || cfg.s > 0;

  const StreamSeeds seeds = stream_seeds(cfg.seed);
  SeededRng subset_rng(seeds.subset);
  SeededRng index_rng(seeds.index);
  SeededRng coord_rng(seeds.coordinate);

  GradientOracle oracle(obj, data);
  TraceRecorder rec(obj, data, opts);
  rec.record(0, w0, 0);

  Vector anchor = w0;
  Vector surrogate = Vector::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t t = 1; t <= cfg.T; ++t) {
    if (variant == Variant::Svrg) {
      surrogate = oracle.full(anchor);
    } else if (cfg.s > 0) {
      surrogate = surrogate_gradient(oracle, sample_subset(n, cfg.s, subset_rng), anchor);
    }

    // w~_t = w~ + (1/K) sum_j (w_j - w~): the mean of w_0..w_{K-1}, exact at
    // a fixed point.
    Vector current = anchor;
    Vector displacement = Vector::Zero(static_cast<Eigen::Index>(p));
    std::vector<Vector> iterates;
    if (opts.record_inner_iterates) iterates.push_back(current);
    rec.observe(current);

    for (std::size_t k = 1; k < cfg.K; ++k) {
      const DirectionContext ctx{anchor, surrogate, current};
      Vector v;
      switch (variant) {
        case Variant::Cheap:
        case Variant::Svrg: {
          const auto i = static_cast<std::size_t>(index_rng.uniform_index(n));
          v = anchored ? cheap_direction(oracle, ctx, i) : oracle.component(i, current);
          break;
        }
        case Variant::MiniBatch: {
          const IndexSet batch = sample_subset(n, cfg.q, index_rng);
          v = anchored ? minibatch_direction(oracle, ctx, batch) : oracle.batch(batch, current);
          break;
        }
        case Variant::Cheaper: {
          const auto i = static_cast<std::size_t>(index_rng.uniform_index(n));
          const IndexSet block = sample_subset(p, b, coord_rng);
          if (anchored) {
            v = coordinate_direction(oracle, ctx, i, block, b);
          } else {
            v = oracle.component_coords(i, current, block);
            v *= static_cast<double>(p) / static_cast<double>(b);
          }
          break;
        }
      }
      current -= cfg.eta * v;
      if (!current.allFinite()) rec.diverge(t, current, oracle.count(), "non-finite iterate");
      displacement += current - anchor;
      if (opts.record_inner_iterates) iterates.push_back(current);
      rec.observe(current);
    }

    anchor += displacement / static_cast<double>(cfg.K);
    rec.close_epoch();
    if (opts.record_inner_iterates) rec.trace().inner_iterates.push_back(std::move(iterates));
    const double value = objective_value(obj, data, anchor);
    if (rec.exceeds_threshold(value)) {
      rec.diverge(t, anchor, oracle.count(), "objective " + std::to_string(value) +
                                                 " above divergence threshold");
    }
    rec.record(t, anchor, oracle.count());
  }
  rec.trace().final_iterate = anchor;
  return std::move(rec.trace());
}

}  // namespace

Trace run_cheap_svrg(const Objective& obj, const Dataset& data, const Vector& w0,
                     const EpochConfig& cfg, const RunOptions& opts) {
  return run_epochs(Variant::Cheap, obj, data, w0, cfg, opts);
}

Trace run_minibatch(const Objective& obj, const Dataset& data, const Vector& w0,
                    const EpochConfig& cfg, const RunOptions& opts) {
  return run_epochs(Variant::MiniBatch, obj, data, w0, cfg, opts);
}

Trace run_cheaper_svrg(const Objective& obj, const Dataset& data, const Vector& w0,
                       const EpochConfig& cfg, const RunOptions& opts) {
  return run_epochs(Variant::Cheaper, obj, data, w0, cfg, opts);
}

Trace run_svrg(const Objective& obj, const Dataset& data, const Vector& w0,
               const EpochConfig& cfg, const RunOptions& opts) {
  EpochConfig full = cfg;
  full.s = data.samples();
  return run_epochs(Variant::Svrg, obj, data, w0, full, opts);
}

Trace run_sgd(const Objective& obj, const Dataset& data, const Vector& w0, std::size_t steps,
              double c, double L, std::uint64_t seed, const RunOptions& opts) {
  validate(obj, data);
  const std::size_t n = data.samples();
  if (steps < 1) throw std::invalid_argument("run_sgd: steps must be >= 1");
  if (!(c >= 0.0) || !(L > 0.0)) throw std::invalid_argument("run_sgd: need c >= 0 and L > 0");
  if (static_cast<std::size_t>(w0.size()) != data.dimension()) {
    throw std::invalid_argument("run_sgd: initial point has wrong dimension");
  }
  SeededRng index_rng(stream_seeds(seed).index);
  GradientOracle oracle(obj, data);
  TraceRecorder rec(obj, data, opts);
  rec.record(0, w0, 0);

  Vector w = w0;
  std::size_t snapshot = 0;
  for (std::size_t k = 1; k <= steps; ++k) {
    const auto i = static_cast<std::size_t>(index_rng.uniform_index(n));
    const double step = c / (L * static_cast<double>(k));
    w -= step * oracle.component(i, w);
    if (!w.allFinite()) rec.diverge(snapshot + 1, w, oracle.count(), "non-finite iterate");
    if (k % n == 0 || k == steps) {
      ++snapshot;
      const double value = objective_value(obj, data, w);
      if (rec.exceeds_threshold(value)) {
        rec.diverge(snapshot, w, oracle.count(), "objective above divergence threshold");
      }
      rec.record(snapshot, w, oracle.count());
    }
  }
  rec.trace().final_iterate = w;
  return std::move(rec.trace());
}

}  // namespace cheapsvrg
