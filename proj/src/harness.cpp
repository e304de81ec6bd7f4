#include "cheapsvrg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace cheapsvrg {

Instance generate_regression_instance(const InstanceSpec& spec) {
  if (spec.n < 1 || spec.p < 1) throw std::invalid_argument("InstanceSpec: need n, p >= 1");
  if (!(spec.noise_norm >= 0.0)) throw std::invalid_argument("InstanceSpec: noise_norm must be >= 0");
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = static_cast<Eigen::Index>(spec.p);
  SeededRng rng(spec.seed);

  Vector w_star(p);
  for (Eigen::Index j = 0; j < p; ++j) w_star(j) = rng.normal();
  w_star /= w_star.norm();

  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.n));
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = scale * rng.normal();
  }

  Vector noise(n);
  for (Eigen::Index i = 0; i < n; ++i) noise(i) = rng.normal();
  if (spec.noise_norm == 0.0) {
    noise.setZero();
  } else {
    noise *= spec.noise_norm / noise.norm();
  }

  Dataset data(std::move(x), Vector::Zero(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    data.targets(i) = data.margin(static_cast<std::size_t>(i), w_star) + noise(i);
  }
  return {std::move(data), std::move(w_star)};
}

// ---------------------------------------------------------------------------

LabelMap binary_label_map() { return std::map<double, double>{{-1.0, -1.0}, {0.0, -1.0}, {1.0, 1.0}}; }

namespace {

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return false;
  const std::string buf(text);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && errno != ERANGE;
}

bool skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Dataset load_dataset(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open for reading");

  std::vector<double> labels;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t width = 0;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> line_of_row;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::vector<std::pair<std::size_t, double>> entries;
    double label = 0.0;
    if (opts.format == DataFormat::Csv) {
      std::vector<std::string_view> fields;
      std::string_view rest(line);
      for (;;) {
        const auto comma = rest.find(',');
        fields.push_back(rest.substr(0, comma));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (fields.size() < 2) throw DataError(where(path, lineno) + "expected label and features");
      if (!parse_double(fields[0], label)) throw DataError(where(path, lineno) + "bad label");
      for (std::size_t j = 1; j < fields.size(); ++j) {
        double v = 0.0;
        if (!parse_double(fields[j], v)) {
          throw DataError(where(path, lineno) + "bad value in column " + std::to_string(j + 1));
        }
        entries.emplace_back(j - 1, v);
      }
      if (!rows.empty() && fields.size() - 1 != width) {
        throw DataError(where(path, lineno) + "expected " + std::to_string(width) +
                        " features, found " + std::to_string(fields.size() - 1));
      }
      width = fields.size() - 1;
    } else {
      std::istringstream tokens(line);
      std::string tok;
      if (!(tokens >> tok) || !parse_double(tok, label)) {
        throw DataError(where(path, lineno) + "bad label");
      }
      while (tokens >> tok) {
        if (tok[0] == '#') break;
        const auto colon = tok.find(':');
        double idx = 0.0;
        double v = 0.0;
        if (colon == std::string::npos || !parse_double(std::string_view(tok).substr(0, colon), idx) ||
            !parse_double(std::string_view(tok).substr(colon + 1), v) || idx < 1 ||
            idx != std::floor(idx)) {
          throw DataError(where(path, lineno) + "bad feature token '" + tok + "'");
        }
        const auto j = static_cast<std::size_t>(idx) - 1;
        entries.emplace_back(j, v);
        width = std::max(width, j + 1);
      }
    }
    if (opts.labels) {
      const auto it = opts.labels->find(label);
      if (it == opts.labels->end()) {
        throw DataError(where(path, lineno) + "label " + format_real(label) + " not in label map");
      }
      label = it->second;
    }
    labels.push_back(label);
    rows.push_back(std::move(entries));
    line_of_row.push_back(lineno);
  }
  if (rows.empty()) throw DataError(path + ": no data rows");

  if (opts.format == DataFormat::SvmLight && opts.num_features > 0) {
    if (width > opts.num_features) {
      throw DataError(path + ": feature index " + std::to_string(width) + " exceeds num_features " +
                      std::to_string(opts.num_features));
    }
    width = opts.num_features;
  }
  if (width == 0) throw DataError(path + ": no features");

  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    y(ii) = labels[i];
    for (const auto& [j, v] : rows[i]) x(ii, static_cast<Eigen::Index>(j)) = v;
    if (opts.normalize_rows) {
      const double norm = x.row(ii).norm();
      if (!(norm > 0.0)) throw DataError(where(path, line_of_row[i]) + "zero feature row cannot be normalized");
      x.row(ii) /= norm;
    }
  }
  return Dataset(std::move(x), std::move(y));
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  for (std::size_t i = 0; i < data.samples(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out << format_real(data.targets(ii));
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) out << ',' << format_real(data.features(ii, j));
    out << '\n';
  }
  if (!out) throw DataError(path + ": write failed");
}

void save_vector(const Vector& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  for (Eigen::Index j = 0; j < v.size(); ++j) out << format_real(v(j)) << '\n';
  if (!out) throw DataError(path + ": write failed");
}

Vector load_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open for reading");
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    double v = 0.0;
    if (!parse_double(line, v)) throw DataError(where(path, lineno) + "bad value");
    values.push_back(v);
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// ---------------------------------------------------------------------------

std::string algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::Sgd: return "sgd";
    case Algorithm::Svrg: return "svrg";
    case Algorithm::Cheap: return "cheap";
    case Algorithm::MiniBatch: return "minibatch";
    case Algorithm::Cheaper: return "cheaper";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::Sgd, Algorithm::Svrg, Algorithm::Cheap, Algorithm::MiniBatch,
                 Algorithm::Cheaper}) {
    if (algorithm_name(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

double step_lipschitz(const Objective& obj, const Dataset& data, LipschitzMode mode) {
  validate(obj, data);
  const double max_row_sq = data.features.rowwise().squaredNorm().maxCoeff();
  if (obj.type == ObjectiveType::LogisticL2) return 0.25 * max_row_sq + 2.0 * obj.lambda;
  if (mode == LipschitzMode::Component) return static_cast<double>(data.samples()) * max_row_sq;
  const double smax = spectral_extremes(data.features).sigma_max;
  return smax * smax;
}

BudgetPlan plan_budget(std::uint64_t total_grads, double perc, std::size_t s, std::size_t q,
                       std::size_t n, Algorithm algo) {
  if (!(perc > 0.0 && perc < 1.0)) throw std::invalid_argument("plan_budget: perc must lie in (0, 1)");
  if (algo == Algorithm::Sgd) throw std::invalid_argument("plan_budget: SGD has no epoch split");
  if (q < 1) throw std::invalid_argument("plan_budget: q must be >= 1");
  BudgetPlan plan;
  plan.total_grads = total_grads;
  plan.perc = perc;
  plan.outer_cost = algo == Algorithm::Svrg ? n : s;
  if (plan.outer_cost < 1) throw std::invalid_argument("plan_budget: s must be >= 1");
  plan.inner_cost = algo == Algorithm::MiniBatch ? 2 * q : 2;
  if (total_grads < plan.outer_cost + plan.inner_cost) {
    throw InfeasibleBudget("budget of " + std::to_string(total_grads) +
                           " atomic gradients cannot pay for one epoch (outer cost " +
                           std::to_string(plan.outer_cost) + " + one inner step " +
                           std::to_string(plan.inner_cost) + ")");
  }
  // Integer split first so 0.8 * 1000 lands on 800, not 799.999...
  const auto inner_budget = static_cast<std::uint64_t>(
      std::floor(perc * static_cast<double>(total_grads) + 1e-9));
  const std::uint64_t outer_budget = total_grads - inner_budget;
  plan.T = static_cast<std::size_t>(std::max<std::uint64_t>(1, outer_budget / plan.outer_cost));
  // Every epoch needs at least one inner step; fewer epochs when the inner
  // share cannot fund one per epoch.
  plan.T = static_cast<std::size_t>(
      std::min<std::uint64_t>(plan.T, std::max<std::uint64_t>(1, inner_budget / plan.inner_cost)));
  plan.K = static_cast<std::size_t>(
      std::max<std::uint64_t>(2, inner_budget / (plan.inner_cost * plan.T) + 1));
  return plan;
}

// ---------------------------------------------------------------------------

void StudyConfig::validate() const {
  if (instance.has_value() == dataset.has_value()) {
    throw std::invalid_argument("StudyConfig: exactly one of instance or dataset is required");
  }
  if (instances < 1 || executions < 1) throw std::invalid_argument("StudyConfig: R and E must be >= 1");
  if (algorithms.empty()) throw std::invalid_argument("StudyConfig: no algorithms");
  if (!(grid_step > 0.0)) throw std::invalid_argument("StudyConfig: grid_step must be > 0");
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    for (std::size_t b = a + 1; b < algorithms.size(); ++b) {
      if (algorithms[a].label == algorithms[b].label) {
        throw std::invalid_argument("StudyConfig: duplicate label '" + algorithms[a].label + "'");
      }
    }
  }
}

std::uint64_t instance_seed(std::uint64_t master, std::size_t r) { return derive_seed(master, r, 0); }

std::uint64_t execution_seed(std::uint64_t master, std::size_t r, std::size_t e) {
  return derive_seed(master, r, e + 1);
}

double trace_value_at(const Trace& trace, double passes, bool distance) {
  const double tol = 1e-12 * std::max(1.0, std::abs(passes));
  double value = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < trace.points.size(); ++k) {
    const auto& pt = trace.points[k];
    if (pt.passes > passes + tol) break;
    if (trace.diverged && k + 1 == trace.points.size()) return HUGE_VAL;
    value = distance ? pt.distance.value_or(std::numeric_limits<double>::quiet_NaN()) : pt.objective;
  }
  return value;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

std::uint64_t epoch_method_budget(const AlgorithmSpec& spec, std::size_t n) {
  const auto& c = spec.cfg;
  const std::uint64_t inner = (spec.algo == Algorithm::MiniBatch ? 2 * c.q : 2) * (c.K - 1);
  const std::uint64_t outer = spec.algo == Algorithm::Svrg ? n : c.s;
  return c.T * (outer + inner);
}

}  // namespace

Trace run_algorithm(const AlgorithmSpec& spec, const Objective& obj, const Dataset& data,
                    const Vector& w0, double L, std::uint64_t seed, const RunOptions& opts) {
  const double eta = spec.eta_abs ? *spec.eta_abs : 1.0 / (spec.eta_c * L);
  EpochConfig cfg = spec.cfg;
  cfg.eta = eta;
  cfg.seed = seed;
  try {
    switch (spec.algo) {
      case Algorithm::Sgd: {
        const std::size_t steps = spec.sgd_steps > 0 ? spec.sgd_steps : cfg.T * data.samples();
        // eta_k = c / (L k) with c = 1/eta_c, or eta_abs / k.
        const double c = spec.eta_abs ? *spec.eta_abs * L : 1.0 / spec.eta_c;
        return run_sgd(obj, data, w0, steps, c, L, seed, opts);
      }
      case Algorithm::Svrg: return run_svrg(obj, data, w0, cfg, opts);
      case Algorithm::Cheap: return run_cheap_svrg(obj, data, w0, cfg, opts);
      case Algorithm::MiniBatch: return run_minibatch(obj, data, w0, cfg, opts);
      case Algorithm::Cheaper: return run_cheaper_svrg(obj, data, w0, cfg, opts);
    }
  } catch (const DivergenceError& err) {
    return err.partial();
  }
  throw std::logic_error("unreachable");
}

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  StudyResult result;
  result.config = cfg;

  struct Problem {
    Dataset data;
    std::optional<Vector> reference;
    double L = 0.0;
    std::uint64_t seed = 0;
  };
  std::vector<Problem> problems;
  if (cfg.instance) {
    for (std::size_t r = 0; r < cfg.instances; ++r) {
      InstanceSpec spec = *cfg.instance;
      spec.seed = instance_seed(cfg.master_seed, r);
      Instance inst;
      try {
        inst = generate_regression_instance(spec);
      } catch (const std::exception& err) {
        throw std::invalid_argument("instance " + std::to_string(r) + ": " + err.what());
      }
      Problem prob{std::move(inst.data), std::move(inst.w_star), 0.0, spec.seed};
      prob.L = step_lipschitz(cfg.objective, prob.data, cfg.lipschitz);
      problems.push_back(std::move(prob));
    }
  } else {
    Dataset data = load_dataset(cfg.dataset->path, cfg.dataset->load);
    const double L = step_lipschitz(cfg.objective, data, cfg.lipschitz);
    for (std::size_t r = 0; r < cfg.instances; ++r) {
      problems.push_back({data, std::nullopt, L, 0});
    }
  }
  const std::size_t n = problems.front().data.samples();
  const std::size_t p = problems.front().data.dimension();

  std::uint64_t widest = 0;
  for (const auto& spec : cfg.algorithms) {
    if (spec.algo != Algorithm::Sgd) widest = std::max(widest, epoch_method_budget(spec, n));
  }

  std::vector<AlgorithmSpec> specs = cfg.algorithms;
  for (auto& spec : specs) {
    if (spec.algo == Algorithm::Sgd && spec.sgd_steps == 0) {
      spec.sgd_steps = widest > 0 ? widest : 30 * n;
    }
    if (spec.algo != Algorithm::Sgd) {
      EpochConfig probe = spec.cfg;
      probe.eta = 1.0;  // the real step depends on each instance's L
      if (spec.algo == Algorithm::Svrg) probe.s = n;
      probe.validate(n, p);
    }
    if (spec.eta_abs ? !(*spec.eta_abs > 0.0) : !(spec.eta_c > 0.0)) {
      throw std::invalid_argument("configuration '" + spec.label + "': step size must be positive");
    }
  }

  for (std::size_t c = 0; c < specs.size(); ++c) {
    for (std::size_t r = 0; r < cfg.instances; ++r) {
      for (std::size_t e = 0; e < cfg.executions; ++e) {
        RunRecord rec;
        rec.config = c;
        rec.instance = r;
        rec.execution = e;
        rec.run_id = r * cfg.executions + e;
        rec.instance_seed = problems[r].seed;
        rec.seed = execution_seed(cfg.master_seed, r, e);
        rec.L = problems[r].L;
        result.runs.push_back(std::move(rec));
      }
    }
  }

  const Vector w0 = Vector::Zero(static_cast<Eigen::Index>(p));
  auto execute = [&](RunRecord& rec) {
    const auto& prob = problems[rec.instance];
    const auto& spec = specs[rec.config];
    RunOptions opts;
    opts.reference = prob.reference;
    rec.eta = spec.eta_abs ? *spec.eta_abs : 1.0 / (spec.eta_c * rec.L);
    rec.trace = run_algorithm(spec, cfg.objective, prob.data, w0, rec.L, rec.seed, opts);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, result.runs.size()));
  if (workers == 1) {
    for (auto& rec : result.runs) execute(rec);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = next++; k < result.runs.size(); k = next++) execute(result.runs[k]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  double max_passes = 0.0;
  for (const auto& rec : result.runs) {
    if (!rec.trace.points.empty()) max_passes = std::max(max_passes, rec.trace.points.back().passes);
  }
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double g = static_cast<double>(k) * cfg.grid_step;
    if (g > max_passes + 1e-12) break;
    grid.push_back(g);
  }

  const bool with_distance = problems.front().reference.has_value();
  for (std::size_t c = 0; c < specs.size(); ++c) {
    ConfigSummary sum;
    sum.label = specs[c].label;
    sum.algo = specs[c].algo;
    sum.grid = grid;
    // A divergent run stays at +inf forever, so only completed runs bound
    // the comparable pass range.
    sum.final_passes = HUGE_VAL;
    std::vector<const Trace*> traces;
    for (const auto& rec : result.runs) {
      if (rec.config != c) continue;
      traces.push_back(&rec.trace);
      if (!rec.trace.diverged) sum.final_passes = std::min(sum.final_passes, rec.trace.points.back().passes);
    }
    for (double g : grid) {
      std::vector<double> obj;
      std::vector<double> dist;
      for (const Trace* t : traces) {
        obj.push_back(trace_value_at(*t, g));
        if (with_distance) dist.push_back(trace_value_at(*t, g, true));
      }
      sum.median_objective.push_back(median(obj));
      if (with_distance) sum.median_distance.push_back(median(dist));
    }
    result.summaries.push_back(std::move(sum));
  }
  return result;
}

double StudyResult::common_passes() const {
  double common = HUGE_VAL;
  for (const auto& sum : summaries) common = std::min(common, sum.final_passes);
  if (common == HUGE_VAL) {
    common = 0.0;
    for (const auto& rec : runs) common = std::max(common, rec.trace.points.back().passes);
  }
  return common;
}

const ConfigSummary& StudyResult::summary(const std::string& label) const {
  for (const auto& sum : summaries) {
    if (sum.label == label) return sum;
  }
  throw std::invalid_argument("no configuration labelled '" + label + "'");
}

double StudyResult::median_objective_at(const std::string& label, double passes) const {
  std::size_t index = summaries.size();
  for (std::size_t c = 0; c < summaries.size(); ++c) {
    if (summaries[c].label == label) index = c;
  }
  if (index == summaries.size()) throw std::invalid_argument("no configuration labelled '" + label + "'");
  std::vector<double> values;
  for (const auto& rec : runs) {
    if (rec.config == index) values.push_back(trace_value_at(rec.trace, passes));
  }
  return median(std::move(values));
}

// ---------------------------------------------------------------------------

std::vector<TraceRow> trace_rows(const Trace& trace, const std::string& algorithm,
                                 const std::string& config_id, std::size_t run_id) {
  std::vector<TraceRow> rows;
  rows.reserve(trace.points.size());
  for (std::size_t k = 0; k < trace.points.size(); ++k) {
    const auto& pt = trace.points[k];
    rows.push_back({algorithm, config_id, run_id, pt.epoch, pt.passes, pt.objective, pt.gap,
                    pt.distance, trace.diverged && k + 1 == trace.points.size()});
  }
  return rows;
}

std::vector<TraceRow> trace_rows(const StudyResult& result) {
  std::vector<TraceRow> rows;
  for (const auto& rec : result.runs) {
    const auto& spec = result.config.algorithms[rec.config];
    auto part = trace_rows(rec.trace, algorithm_name(spec.algo), spec.label, rec.run_id);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

void write_trace_rows(const std::vector<TraceRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << kTraceHeader << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.config_id << ',' << r.run_id << ',' << r.epoch << ','
        << format_real(r.passes) << ',' << format_real(r.objective) << ',' << opt(r.gap) << ','
        << opt(r.distance) << ',' << (r.diverged ? 1 : 0) << '\n';
  }
  if (!out) throw DataError(path + ": write failed");
}

void write_traces(const StudyResult& result, const std::string& path) {
  write_trace_rows(trace_rows(result), path);
  const std::string manifest_path = path + ".manifest.json";
  std::ofstream out(manifest_path);
  if (!out) throw DataError(manifest_path + ": cannot open for writing");
  out << study_manifest(result) << '\n';
  if (!out) throw DataError(manifest_path + ": write failed");
}

std::vector<TraceRow> read_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open for reading");
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw DataError(path + ":1: missing or unexpected header");
  }
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.emplace_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 9) throw DataError(where(path, lineno) + "expected 9 fields");
    TraceRow r;
    r.algorithm = f[0];
    r.config_id = f[1];
    double v = 0.0;
    auto real = [&](const std::string& s, const char* name) {
      if (!parse_double(s, v)) throw DataError(where(path, lineno) + "bad " + name);
      return v;
    };
    r.run_id = static_cast<std::size_t>(real(f[2], "run_id"));
    r.epoch = static_cast<std::size_t>(real(f[3], "epoch"));
    r.passes = real(f[4], "passes");
    r.objective = real(f[5], "objective");
    if (!f[6].empty()) r.gap = real(f[6], "gap");
    if (!f[7].empty()) r.distance = real(f[7], "distance");
    r.diverged = real(f[8], "diverged") != 0.0;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string study_manifest(const StudyResult& result) {
  using nlohmann::json;
  const auto& cfg = result.config;
  json m;
  m["library"] = "cheapsvrg";
  m["version"] = kVersion;
  m["master_seed"] = cfg.master_seed;
  m["instances"] = cfg.instances;
  m["executions"] = cfg.executions;
  m["grid_step"] = cfg.grid_step;
  m["lipschitz_mode"] = cfg.lipschitz == LipschitzMode::Spectral ? "spectral" : "component";
  m["objective"] = {{"type", cfg.objective.type == ObjectiveType::LeastSquares ? "least_squares" : "logistic_l2"},
                    {"lambda", cfg.objective.lambda}};
  if (cfg.instance) {
    m["instance"] = {{"n", cfg.instance->n}, {"p", cfg.instance->p}, {"noise_norm", cfg.instance->noise_norm}};
  }
  if (cfg.dataset) {
    m["dataset"] = {{"path", cfg.dataset->path},
                    {"format", cfg.dataset->load.format == DataFormat::Csv ? "csv" : "svmlight"},
                    {"normalize_rows", cfg.dataset->load.normalize_rows}};
  }
  json algos = json::array();
  for (const auto& spec : cfg.algorithms) {
    json a = {{"label", spec.label},  {"algorithm", algorithm_name(spec.algo)},
              {"eta_c", spec.eta_c},  {"s", spec.cfg.s},
              {"q", spec.cfg.q},      {"b", spec.cfg.b},
              {"K", spec.cfg.K},      {"T", spec.cfg.T},
              {"sgd_steps", spec.sgd_steps}};
    if (spec.eta_abs) a["eta_abs"] = *spec.eta_abs;
    algos.push_back(a);
  }
  m["algorithms"] = algos;
  json runs = json::array();
  for (const auto& rec : result.runs) {
    runs.push_back({{"config_id", cfg.algorithms[rec.config].label},
                    {"run_id", rec.run_id},
                    {"instance", rec.instance},
                    {"execution", rec.execution},
                    {"instance_seed", rec.instance_seed},
                    {"seed", rec.seed},
                    {"L", rec.L},
                    {"eta", rec.eta},
                    {"gradients", rec.trace.points.empty() ? 0 : rec.trace.points.back().gradients},
                    {"diverged", rec.trace.diverged}});
  }
  m["runs"] = runs;
  return m.dump(2);
}

}  // namespace cheapsvrg
