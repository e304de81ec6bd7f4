#ifndef CHEAPSVRG_HARNESS_HPP
#define CHEAPSVRG_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cheapsvrg/numerics.hpp"
#include "cheapsvrg/objectives.hpp"
#include "cheapsvrg/optimizers.hpp"

namespace cheapsvrg {

inline constexpr const char* kVersion = "1.0.0";

/// Malformed or unreadable input files; the message carries path and line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A budget that cannot pay for a single epoch.
class InfeasibleBudget : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Synthetic least-squares instances

struct InstanceSpec {
  std::size_t n = 200;
  std::size_t p = 50;
  double noise_norm = 0.0;  ///< ||epsilon||_2
  std::uint64_t seed = 0;
};

struct Instance {
  Dataset data;
  Vector w_star;  ///< ground truth, unit norm
};

/// Draw order from one SeededRng(spec.seed): w* (p normals, rescaled to unit
/// norm), X row by row (n*p normals scaled by 1/sqrt(n)), epsilon (n normals,
/// rescaled to noise_norm). y_i = x_i^T w* + epsilon_i.
Instance generate_regression_instance(const InstanceSpec& spec);

// ---------------------------------------------------------------------------
// Dataset files

enum class DataFormat { Csv, SvmLight };

/// Raw label -> mapped label. An empty optional keeps labels as read.
using LabelMap = std::optional<std::map<double, double>>;
/// {-1 -> -1, 0 -> -1, +1 -> +1}.
LabelMap binary_label_map();

struct LoadOptions {
  DataFormat format = DataFormat::Csv;
  bool normalize_rows = false;
  LabelMap labels;
  std::size_t num_features = 0;  ///< svmlight: 0 infers the largest index seen
};

/// CSV rows are `label,feat1,...,featP`; svmlight rows are
/// `label idx:val ...` with 1-based indices, densified. Blank lines and lines
/// starting with '#' are skipped. Throws DataError with `path:line:` context.
Dataset load_dataset(const std::string& path, const LoadOptions& opts = {});

/// Writes `label,feat...` rows with 17 significant digits.
void save_dataset_csv(const Dataset& data, const std::string& path);
void save_vector(const Vector& v, const std::string& path);
Vector load_vector(const std::string& path);

// ---------------------------------------------------------------------------
// Algorithms, step sizes and budgets

enum class Algorithm { Sgd, Svrg, Cheap, MiniBatch, Cheaper };
std::string algorithm_name(Algorithm algo);
/// Accepts sgd, svrg, cheap, minibatch, cheaper. Throws std::invalid_argument.
Algorithm parse_algorithm(const std::string& name);

enum class LipschitzMode {
  Spectral,      ///< least squares: sigma_max^2(X); logistic: max ||x_i||^2/4 + 2 lambda
  Component,  ///< rigorous per-component bound
};
/// The L used in eta = 1/(c L).
double step_lipschitz(const Objective& obj, const Dataset& data, LipschitzMode mode);

struct BudgetPlan {
  std::uint64_t total_grads = 0;
  double perc = 0.0;
  std::uint64_t outer_cost = 0;  ///< per epoch: s, or n for SVRG
  std::uint64_t inner_cost = 0;  ///< per inner step: 2q
  std::size_t T = 0;
  std::size_t K = 0;
  std::uint64_t planned_spend() const { return T * (outer_cost + inner_cost * (K - 1)); }
};

/// T = max(1, floor((1 - perc) total / outer)), K = max(2, floor(perc total /
/// (2qT)) + 1). T is lowered to max(1, floor(perc total / 2q)) when the
/// inner share cannot fund one step per epoch. Throws std::invalid_argument
/// unless 0 < perc < 1, and InfeasibleBudget when total < outer + 2q.
BudgetPlan plan_budget(std::uint64_t total_grads, double perc, std::size_t s, std::size_t q,
                       std::size_t n, Algorithm algo);

// ---------------------------------------------------------------------------
// Studies

struct AlgorithmSpec {
  std::string label;  ///< becomes config_id in trace files
  Algorithm algo = Algorithm::Cheap;
  EpochConfig cfg;  ///< eta and seed are filled per run
  double eta_c = 300.0;  ///< eta = 1/(eta_c L); SGD uses eta_k = 1/(eta_c L k)
  std::optional<double> eta_abs;
  std::size_t sgd_steps = 0;  ///< 0: match the largest epoch-method budget
};

struct DatasetSource {
  std::string path;
  LoadOptions load;
};

struct StudyConfig {
  std::optional<InstanceSpec> instance;  ///< instance.seed is ignored; seeds derive from master
  std::optional<DatasetSource> dataset;
  Objective objective = Objective::least_squares();
  std::vector<AlgorithmSpec> algorithms;
  std::size_t instances = 1;   ///< R
  std::size_t executions = 1;  ///< E
  std::uint64_t master_seed = 1;
  LipschitzMode lipschitz = LipschitzMode::Spectral;
  double grid_step = 1.0;  ///< passes between median grid points
  unsigned threads = 1;

  void validate() const;
};

struct RunRecord {
  std::size_t config = 0;  ///< index into StudyConfig::algorithms
  std::size_t run_id = 0;  ///< instance * E + execution
  std::size_t instance = 0;
  std::size_t execution = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t seed = 0;
  double L = 0.0;
  double eta = 0.0;
  Trace trace;
};

struct ConfigSummary {
  std::string label;
  Algorithm algo = Algorithm::Cheap;
  std::vector<double> grid;  ///< passes
  std::vector<double> median_objective;
  std::vector<double> median_distance;  ///< empty without a reference point
  double final_passes = 0.0;            ///< smallest final pass count over runs that
                                        ///< did not diverge (+inf if none)
};

struct StudyResult {
  StudyConfig config;
  std::vector<RunRecord> runs;  ///< sorted by (config, run_id)
  std::vector<ConfigSummary> summaries;

  /// Largest pass count every configuration reaches; divergent runs do not
  /// limit it.
  double common_passes() const;
  /// Median objective of configuration `label` at `passes` (step
  /// interpolation; divergent runs count as +inf after diverging).
  double median_objective_at(const std::string& label, double passes) const;
  const ConfigSummary& summary(const std::string& label) const;
};

/// instance seed = derive_seed(master, r, 0); execution seed =
/// derive_seed(master, r, e + 1).
std::uint64_t instance_seed(std::uint64_t master, std::size_t r);
std::uint64_t execution_seed(std::uint64_t master, std::size_t r, std::size_t e);

/// Last recorded value at or before `passes`; +inf once a divergent trace
/// has hit its divergence point.
double trace_value_at(const Trace& trace, double passes, bool distance = false);
/// Median (mean of middle pair for even counts).
double median(std::vector<double> values);

/// Runs every (config, instance, execution) triple. Instance-generation and
/// load failures propagate as DataError / std::invalid_argument with context.
StudyResult run_study(const StudyConfig& cfg);

/// Runs one algorithm with `spec`'s knobs; divergence is caught and
/// reported through Trace::diverged.
Trace run_algorithm(const AlgorithmSpec& spec, const Objective& obj, const Dataset& data,
                    const Vector& w0, double L, std::uint64_t seed, const RunOptions& opts);

// ---------------------------------------------------------------------------
// Trace files

struct TraceRow {
  std::string algorithm;
  std::string config_id;
  std::size_t run_id = 0;
  std::size_t epoch = 0;
  double passes = 0.0;
  double objective = 0.0;
  std::optional<double> gap;
  std::optional<double> distance;
  bool diverged = false;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

inline constexpr const char* kTraceHeader =
    "algorithm,config_id,run_id,epoch,passes,objective,gap,distance,diverged";

/// Flattens traces into rows; only the divergence point carries diverged=1.
std::vector<TraceRow> trace_rows(const Trace& trace, const std::string& algorithm,
                                 const std::string& config_id, std::size_t run_id);
std::vector<TraceRow> trace_rows(const StudyResult& result);

/// CSV with kTraceHeader; reals with 17 significant digits, unknown gap or
/// distance as empty fields. Writes `<path>.manifest.json` alongside.
/// Throws DataError naming the path on I/O failure.
void write_traces(const StudyResult& result, const std::string& path);
void write_trace_rows(const std::vector<TraceRow>& rows, const std::string& path);
std::vector<TraceRow> read_traces(const std::string& path);

/// JSON manifest text: every config field, seeds and the library version.
std::string study_manifest(const StudyResult& result);

}  // namespace cheapsvrg

#endif  // CHEAPSVRG_HARNESS_HPP
