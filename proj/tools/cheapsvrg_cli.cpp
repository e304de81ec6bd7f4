// cheapsvrg command-line tool: generate | run | study | theory | check.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cheapsvrg/checks.hpp"
#include "cheapsvrg/harness.hpp"
#include "cheapsvrg/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cheapsvrg;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3, kDiverged = 4, kBudget = 5, kTheory = 6 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// JSON has no infinity; non-finite values become null.
json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct DataFlags {
  std::string data;
  std::string w_star;
  std::string format = "csv";
  bool normalize = false;
  std::string labels = "none";
  std::string objective = "ls";
  double lambda = 1e-6;
  std::string lipschitz = "spectral";

  void add(CLI::App* cmd) {
    cmd->add_option("--data", data, "Dataset file, or a directory holding data.csv (and w_star.csv)");
    cmd->add_option("--w-star", w_star, "Reference point file (one value per line)");
    cmd->add_option("--format", format, "Dataset format")->check(CLI::IsMember({"csv", "svmlight"}));
    cmd->add_flag("--normalize", normalize, "Rescale every feature row to unit norm");
    cmd->add_option("--labels", labels, "Label map: none, or binary ({-1,0} -> -1, 1 -> +1)")
        ->check(CLI::IsMember({"none", "binary"}));
    cmd->add_option("--objective", objective, "ls or logistic")->check(CLI::IsMember({"ls", "logistic"}));
    cmd->add_option("--lambda", lambda, "l2 weight for logistic");
    cmd->add_option("--lipschitz", lipschitz, "L used in eta = 1/(cL)")
        ->check(CLI::IsMember({"spectral", "component"}));
  }

  Objective make_objective() const {
    return objective == "ls" ? Objective::least_squares() : Objective::logistic(lambda);
  }

  LipschitzMode mode() const { return lipschitz == "spectral" ? LipschitzMode::Spectral : LipschitzMode::Component; }

  LoadOptions load_options() const {
    LoadOptions opts;
    opts.format = format == "csv" ? DataFormat::Csv : DataFormat::SvmLight;
    opts.normalize_rows = normalize;
    if (labels == "binary") opts.labels = binary_label_map();
    return opts;
  }

  // Resolves a directory to data.csv and, when present, w_star.csv.
  std::pair<std::string, std::string> paths() const {
    if (data.empty()) throw UsageError("--data is required");
    std::string file = data;
    std::string ref = w_star;
    if (fs::is_directory(data)) {
      file = (fs::path(data) / "data.csv").string();
      const auto candidate = fs::path(data) / "w_star.csv";
      if (ref.empty() && fs::exists(candidate)) ref = candidate.string();
    }
    return {file, ref};
  }
};

unsigned thread_count() {
  if (const char* env = std::getenv("CHEAPSVRG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

struct GenerateFlags {
  std::size_t n = 200;
  std::size_t p = 50;
  double noise = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  bool as_json = false;
};

int cmd_generate(const GenerateFlags& f) {
  const Instance inst = generate_regression_instance({f.n, f.p, f.noise, f.seed});
  std::error_code ec;
  fs::create_directories(f.out, ec);
  if (ec) throw DataError(f.out + ": " + ec.message());
  const std::string data_path = (fs::path(f.out) / "data.csv").string();
  const std::string ref_path = (fs::path(f.out) / "w_star.csv").string();
  save_dataset_csv(inst.data, data_path);
  save_vector(inst.w_star, ref_path);

  const Objective obj = Objective::least_squares();
  const SpectralExtremes sv = spectral_extremes(inst.data.features);
  const double L = sv.sigma_max * sv.sigma_max;
  const double gamma = sv.sigma_min * sv.sigma_min;
  const double L_component = step_lipschitz(obj, inst.data, LipschitzMode::Component);
  const double f_star = objective_value(obj, inst.data, inst.w_star);
  if (f.as_json) {
    std::cout << json{{"data", data_path},     {"w_star", ref_path},         {"n", f.n},
                      {"p", f.p},              {"L", L},                     {"gamma", gamma},
                      {"L_component", L_component}, {"F_w_star", f_star},    {"rank", sv.rank}}
                     .dump(2)
              << '\n';
  } else {
    std::cout << "wrote " << data_path << " and " << ref_path << '\n'
              << "L = sigma_max^2(X) = " << num(L) << '\n'
              << "gamma = sigma_min^2(X) = " << num(gamma) << '\n'
              << "L_component = n max ||x_i||^2 = " << num(L_component) << '\n'
              << "F(w*) = " << num(f_star) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct RunFlags {
  DataFlags data;
  std::string algo = "cheap";
  double eta_c = 300.0;
  std::optional<double> eta_abs;
  std::size_t s = 1;
  std::size_t q = 1;
  std::size_t b = 0;
  std::size_t K = 0;
  std::size_t T = 10;
  std::size_t sgd_steps = 0;
  std::uint64_t seed = 1;
  std::string out;
  bool as_json = false;
};

int cmd_run(const RunFlags& f) {
  AlgorithmSpec spec;
  try {
    spec.algo = parse_algorithm(f.algo);
  } catch (const std::invalid_argument& err) {
    throw UsageError(err.what());
  }
  const auto [file, ref] = f.data.paths();
  const Dataset data = load_dataset(file, f.data.load_options());
  const Objective obj = f.data.make_objective();
  RunOptions opts;
  if (!ref.empty()) {
    opts.reference = load_vector(ref);
    if (static_cast<std::size_t>(opts.reference->size()) != data.dimension()) {
      throw DataError(ref + ": reference has " + std::to_string(opts.reference->size()) +
                      " entries, data has p = " + std::to_string(data.dimension()));
    }
  }

  spec.label = f.algo;
  spec.eta_c = f.eta_c;
  spec.eta_abs = f.eta_abs;
  spec.cfg.s = f.s;
  spec.cfg.q = f.q;
  spec.cfg.b = f.b;
  spec.cfg.K = f.K > 0 ? f.K : 2 * data.samples();
  spec.cfg.T = f.T;
  spec.sgd_steps = f.sgd_steps;
  if (!(spec.eta_abs ? *spec.eta_abs > 0.0 : spec.eta_c > 0.0)) throw UsageError("step size must be positive");

  const double L = step_lipschitz(obj, data, f.data.mode());
  const Vector w0 = Vector::Zero(static_cast<Eigen::Index>(data.dimension()));
  const Trace trace = run_algorithm(spec, obj, data, w0, L, f.seed, opts);

  if (!f.out.empty()) write_trace_rows(trace_rows(trace, f.algo, f.algo, 0), f.out);
  const TracePoint& last = trace.points.back();
  if (f.as_json) {
    json j{{"algorithm", f.algo},
           {"L", L},
           {"eta", spec.eta_abs ? *spec.eta_abs : 1.0 / (spec.eta_c * L)},
           {"epochs", last.epoch},
           {"objective", jnum(last.objective)},
           {"gradients", last.gradients},
           {"passes", last.passes},
           {"diverged", trace.diverged}};
    j["gap"] = last.gap ? jnum(*last.gap) : json(nullptr);
    j["distance"] = last.distance ? jnum(*last.distance) : json(nullptr);
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "objective " << num(last.objective) << '\n'
              << "gap " << (last.gap ? num(*last.gap) : std::string("n/a")) << '\n'
              << "distance " << (last.distance ? num(*last.distance) : std::string("n/a")) << '\n'
              << "passes " << num(last.passes) << '\n'
              << "diverged " << (trace.diverged ? "yes" : "no") << '\n';
  }
  return trace.diverged ? kDiverged : kOk;
}

// ---------------------------------------------------------------------------

struct StudyFlags {
  DataFlags data;
  std::string config;
  std::size_t n = 200;
  std::size_t p = 50;
  double noise = 0.1;
  std::vector<std::string> algos;
  double eta_c = 300.0;
  std::size_t K = 0;
  std::size_t T = 30;
  std::optional<std::uint64_t> budget;
  double perc = 0.75;
  std::size_t R = 3;
  std::size_t E = 3;
  std::uint64_t seed = 1;
  std::string out;
  bool as_json = false;
};

// "cheap:s=20,K=50" -> spec. Keys: s q b K T c (eta_c) eta sgd_steps label.
AlgorithmSpec parse_algo_spec(const std::string& text, double eta_c, std::size_t K, std::size_t T) {
  AlgorithmSpec spec;
  const auto colon = text.find(':');
  spec.algo = parse_algorithm(text.substr(0, colon));
  spec.label = text;
  spec.eta_c = eta_c;
  spec.cfg.K = K;
  spec.cfg.T = T;
  if (colon == std::string::npos) return spec;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad algorithm option '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    auto count = [&] {
      const unsigned long long v = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument("bad value for " + key);
      return static_cast<std::size_t>(v);
    };
    auto real = [&] {
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("bad value for " + key);
      return v;
    };
    if (key == "s") spec.cfg.s = count();
    else if (key == "q") spec.cfg.q = count();
    else if (key == "b") spec.cfg.b = count();
    else if (key == "K") spec.cfg.K = count();
    else if (key == "T") spec.cfg.T = count();
    else if (key == "c") spec.eta_c = real();
    else if (key == "eta") spec.eta_abs = real();
    else if (key == "sgd_steps") spec.sgd_steps = count();
    else if (key == "label") spec.label = value;
    else throw std::invalid_argument("unknown algorithm option '" + key + "'");
  }
  return spec;
}

StudyConfig config_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open for reading");
  json j;
  try {
    in >> j;
  } catch (const json::exception& err) {
    throw DataError(path + ": " + err.what());
  }
  StudyConfig cfg;
  try {
    if (j.contains("instance")) {
      const auto& i = j["instance"];
      cfg.instance = InstanceSpec{i.value("n", std::size_t{200}), i.value("p", std::size_t{50}),
                                  i.value("noise_norm", 0.1), 0};
    }
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      DatasetSource src;
      src.path = d.at("path").get<std::string>();
      src.load.format = d.value("format", std::string("csv")) == "svmlight" ? DataFormat::SvmLight : DataFormat::Csv;
      src.load.normalize_rows = d.value("normalize_rows", false);
      if (d.value("labels", std::string("none")) == "binary") src.load.labels = binary_label_map();
      cfg.dataset = src;
    }
    if (j.contains("objective")) {
      const auto& o = j["objective"];
      cfg.objective = o.value("type", std::string("least_squares")) == "logistic_l2"
                          ? Objective::logistic(o.value("lambda", 1e-6))
                          : Objective::least_squares();
    }
    cfg.instances = j.value("R", std::size_t{1});
    cfg.executions = j.value("E", std::size_t{1});
    cfg.master_seed = j.value("seed", std::uint64_t{1});
    cfg.grid_step = j.value("grid_step", 1.0);
    cfg.lipschitz = j.value("lipschitz", std::string("spectral")) == "component" ? LipschitzMode::Component
                                                                              : LipschitzMode::Spectral;
    for (const auto& a : j.at("algorithms")) {
      AlgorithmSpec spec;
      spec.algo = parse_algorithm(a.at("algorithm").get<std::string>());
      spec.label = a.value("label", algorithm_name(spec.algo));
      spec.cfg.s = a.value("s", std::size_t{1});
      spec.cfg.q = a.value("q", std::size_t{1});
      spec.cfg.b = a.value("b", std::size_t{0});
      spec.cfg.K = a.value("K", std::size_t{0});
      spec.cfg.T = a.value("T", std::size_t{30});
      spec.eta_c = a.value("eta_c", 300.0);
      if (a.contains("eta_abs")) spec.eta_abs = a["eta_abs"].get<double>();
      spec.sgd_steps = a.value("sgd_steps", std::size_t{0});
      cfg.algorithms.push_back(spec);
    }
  } catch (const json::exception& err) {
    throw UsageError(path + ": " + err.what());
  }
  return cfg;
}

int cmd_study(const StudyFlags& f) {
  StudyConfig cfg;
  std::optional<std::uint64_t> budget = f.budget;
  double perc = f.perc;
  if (!f.config.empty()) {
    cfg = config_from_json(f.config);
    std::ifstream in(f.config);
    const json j = json::parse(in);
    if (j.contains("budget")) budget = j["budget"].get<std::uint64_t>();
    perc = j.value("perc", perc);
  } else {
    if (!f.data.data.empty()) {
      const auto [file, ref] = f.data.paths();
      cfg.dataset = DatasetSource{file, f.data.load_options()};
    } else {
      cfg.instance = InstanceSpec{f.n, f.p, f.noise, 0};
    }
    cfg.objective = f.data.make_objective();
    cfg.lipschitz = f.data.mode();
    cfg.instances = f.R;
    cfg.executions = f.E;
    cfg.master_seed = f.seed;
    const std::vector<std::string> algos =
        f.algos.empty() ? std::vector<std::string>{"svrg", "cheap:s=20", "cheap:s=1", "sgd:c=10"} : f.algos;
    for (const auto& text : algos) {
      try {
        cfg.algorithms.push_back(parse_algo_spec(text, f.eta_c, f.K, f.T));
      } catch (const std::exception& err) {
        throw UsageError("--algo " + text + ": " + err.what());
      }
    }
  }
  cfg.threads = thread_count();

  std::size_t n = 0;
  if (cfg.instance) {
    n = cfg.instance->n;
  } else if (cfg.dataset) {
    n = load_dataset(cfg.dataset->path, cfg.dataset->load).samples();
  }
  for (auto& spec : cfg.algorithms) {
    if (budget && spec.algo != Algorithm::Sgd) {
      const BudgetPlan plan = plan_budget(*budget, perc, spec.cfg.s, spec.cfg.q, n, spec.algo);
      spec.cfg.T = plan.T;
      spec.cfg.K = plan.K;
    } else if (budget && spec.sgd_steps == 0) {
      spec.sgd_steps = *budget;
    }
    if (spec.cfg.K == 0) spec.cfg.K = 2 * n;
  }

  const StudyResult result = run_study(cfg);
  std::string trace_path;
  if (!f.out.empty()) {
    std::error_code ec;
    fs::create_directories(f.out, ec);
    if (ec) throw DataError(f.out + ": " + ec.message());
    trace_path = (fs::path(f.out) / "traces.csv").string();
    write_traces(result, trace_path);
  }

  const double passes = result.common_passes();
  json rows = json::array();
  for (std::size_t c = 0; c < cfg.algorithms.size(); ++c) {
    const auto& spec = cfg.algorithms[c];
    std::size_t diverged = 0;
    for (const auto& rec : result.runs) diverged += rec.config == c && rec.trace.diverged;
    rows.push_back({{"config_id", spec.label},
                    {"algorithm", algorithm_name(spec.algo)},
                    {"T", spec.cfg.T},
                    {"K", spec.cfg.K},
                    {"median_objective", jnum(result.median_objective_at(spec.label, passes))},
                    {"diverged_runs", diverged}});
  }
  if (f.as_json) {
    std::cout << json{{"passes", passes}, {"traces", trace_path}, {"configs", rows}}.dump(2) << '\n';
  } else {
    std::cout << "median objective at " << num(passes) << " effective passes\n";
    for (const auto& r : rows) {
      const auto& m = r["median_objective"];
      std::cout << "  " << r["config_id"].get<std::string>() << "  "
                << (m.is_null() ? std::string("inf") : num(m.get<double>()));
      if (r["diverged_runs"].get<std::size_t>() > 0) std::cout << "  (" << r["diverged_runs"] << " diverged)";
      std::cout << '\n';
    }
    if (!trace_path.empty()) std::cout << "traces: " << trace_path << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct TheoryFlags {
  theory::TheoryParams params;
  double eta = 0.0;
  std::size_t K = 1000;
  std::size_t s = 1;
  std::size_t q = 1;
  std::size_t b = 0;
  bool as_json = false;
};

int cmd_theory(const TheoryFlags& f) {
  try {
    f.params.validate();
  } catch (const std::invalid_argument& err) {
    throw UsageError(err.what());
  }
  if (!(f.eta > 0.0)) throw UsageError("--eta must be > 0");
  if (f.K < 1) throw UsageError("--K must be >= 1");
  if (f.q < 1) throw UsageError("--q must be >= 1");
  if (f.params.p > 0 && f.b > f.params.p) throw UsageError("--b exceeds --p");
  EpochConfig cfg;
  cfg.eta = f.eta;
  cfg.K = f.K;
  cfg.s = f.s;
  cfg.q = f.q;
  cfg.b = f.b;
  const theory::BoundReport rep = theory::feasibility_check(f.params, cfg);
  const auto budget = theory::gradient_budget(f.K, f.s, rep.variant == "coordinate" ? 1 : f.q, rep.T_min);

  auto verdict = [](const theory::ConditionVerdict& v) {
    return json{{"pass", v.pass}, {"detail", v.detail}};
  };
  if (f.as_json) {
    json j{{"variant", rep.variant},
           {"rho", jnum(rep.rho)},
           {"kappa", jnum(rep.kappa)},
           {"eta_max", rep.eta_max},
           {"eta_stability", rep.eta_stability},
           {"eta_max_theta", rep.eta_max_theta},
           {"K_min", rep.K_min},
           {"K_min_theta", rep.K_min_theta},
           {"T_min", rep.T_min},
           {"T_formula", rep.T_formula},
           {"grads_per_epoch", rep.grads_per_epoch},
           {"total_grads", budget.exact},
           {"total_grads_asymptotic", budget.asymptotic},
           {"C1", verdict(rep.c1)},
           {"C2", verdict(rep.c2)},
           {"C3", verdict(rep.c3)},
           {"theta_eta_ok", rep.theta_eta_ok},
           {"theta_K_ok", rep.theta_K_ok},
           {"stable", rep.stable},
           {"feasible", rep.feasible},
           {"reason", rep.reason}};
    std::cout << j.dump(2) << '\n';
  } else {
    auto opt = [](double x) { return std::isnan(x) ? std::string("undefined") : num(x); };
    std::cout << "variant " << rep.variant << '\n'
              << "rho " << opt(rep.rho) << '\n'
              << "kappa " << opt(rep.kappa) << '\n'
              << "eta_max " << num(rep.eta_max) << " (C1), " << num(rep.eta_stability)
              << " (stability), " << num(rep.eta_max_theta) << " (theta)\n"
              << "K_min " << rep.K_min << " (C2), " << rep.K_min_theta << " (theta)\n"
              << "T_min " << rep.T_min << " (formula " << rep.T_formula << ")\n"
              << "gradients " << budget.exact << " exact, " << budget.asymptotic << " asymptotic ("
              << rep.grads_per_epoch << " per epoch)\n"
              << "C1 " << (rep.c1.pass ? "pass" : "fail") << ": " << rep.c1.detail << '\n'
              << "C2 " << (rep.c2.pass ? "pass" : "fail") << ": " << rep.c2.detail << '\n'
              << "C3 " << (rep.c3.pass ? "pass" : "fail") << ": " << rep.c3.detail << '\n'
              << "feasible " << (rep.feasible ? "yes" : "no") << '\n';
  }
  if (!rep.stable) {
    std::cerr << "infeasible: " << rep.c1.detail << '\n';
    return kTheory;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct CheckFlags {
  std::uint64_t seed = 1;
  double fault = 1.0;
  bool as_json = false;
};

int cmd_check(const CheckFlags& f) {
  checks::CheckOptions opts;
  opts.seed = f.seed;
  if (f.fault != 1.0) opts.direction = checks::scaled_direction(f.fault);
  const auto results = checks::run_all_checks(opts);
  bool all = true;
  json rows = json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    rows.push_back({{"name", r.name},
                    {"pass", r.pass},
                    {"max_deviation", jnum(r.max_deviation)},
                    {"tolerance", r.tolerance},
                    {"detail", r.detail}});
  }
  if (f.as_json) {
    std::cout << json{{"pass", all}, {"checks", rows}}.dump(2) << '\n';
  } else {
    for (const auto& r : results) {
      char line[160];
      std::snprintf(line, sizeof line, "%-4s %-24s max deviation %.3e (tol %.0e)", r.pass ? "ok" : "FAIL",
                    r.name.c_str(), r.max_deviation, r.tolerance);
      std::cout << line << "  " << r.detail << '\n';
    }
    if (!all) {
      std::cout << "failed:";
      for (const auto& r : results) {
        if (!r.pass) std::cout << ' ' << r.name;
      }
      std::cout << '\n';
    }
  }
  return all ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CheapSVRG optimizers, bound calculators and experiment harness"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic least-squares instance");
  generate->add_option("--n", gen.n, "Samples")->check(CLI::PositiveNumber);
  generate->add_option("--p", gen.p, "Features")->check(CLI::PositiveNumber);
  generate->add_option("--noise", gen.noise, "||epsilon||_2")->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", gen.seed, "Seed");
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_flag("--json", gen.as_json, "Machine-readable output");

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Run one optimizer and write its trace");
  run.data.add(run_cmd);
  run_cmd->add_option("--algo", run.algo, "sgd, svrg, cheap, minibatch or cheaper");
  run_cmd->add_option("--eta-c", run.eta_c, "Step eta = 1/(c L); SGD uses eta_k = 1/(c L k)");
  run_cmd->add_option("--eta-abs", run.eta_abs, "Absolute step size (overrides --eta-c)");
  run_cmd->add_option("--s", run.s, "Surrogate subset size");
  run_cmd->add_option("--q", run.q, "Inner mini-batch size");
  run_cmd->add_option("--b", run.b, "Coordinate block size (0: all)");
  run_cmd->add_option("--K", run.K, "Points per epoch (0: 2n)");
  run_cmd->add_option("--T", run.T, "Epochs");
  run_cmd->add_option("--sgd-steps", run.sgd_steps, "SGD steps (0: T n)");
  run_cmd->add_option("--seed", run.seed, "Seed");
  run_cmd->add_option("--out", run.out, "Trace CSV path");
  run_cmd->add_flag("--json", run.as_json, "Machine-readable output");

  StudyFlags st;
  auto* study = app.add_subcommand("study", "Monte-Carlo study with median traces");
  st.data.add(study);
  study->add_option("--config", st.config, "JSON study file");
  study->add_option("--n", st.n, "Synthetic samples")->check(CLI::PositiveNumber);
  study->add_option("--p", st.p, "Synthetic features")->check(CLI::PositiveNumber);
  study->add_option("--noise", st.noise, "Synthetic ||epsilon||_2")->check(CLI::NonNegativeNumber);
  study->add_option("--algo", st.algos, "Repeatable, e.g. cheap:s=20 or sgd:c=10");
  study->add_option("--eta-c", st.eta_c, "Default step divisor c");
  study->add_option("--K", st.K, "Default points per epoch (0: 2n)");
  study->add_option("--T", st.T, "Default epochs");
  study->add_option("--budget", st.budget, "Atomic-gradient budget; sets T and K per algorithm");
  study->add_option("--perc", st.perc, "Inner-loop share of the budget");
  study->add_option("--R", st.R, "Instances")->check(CLI::PositiveNumber);
  study->add_option("--E", st.E, "Executions per instance")->check(CLI::PositiveNumber);
  study->add_option("--seed", st.seed, "Master seed");
  study->add_option("--out", st.out, "Output directory");
  study->add_flag("--json", st.as_json, "Machine-readable output");

  TheoryFlags th;
  auto* theory_cmd = app.add_subcommand("theory", "Evaluate rho, kappa and conditions C1-C3");
  theory_cmd->add_option("--L", th.params.L, "Smoothness constant");
  theory_cmd->add_option("--gamma", th.params.gamma, "Strong convexity");
  theory_cmd->add_option("--eta", th.eta, "Step size")->required();
  theory_cmd->add_option("--K", th.K, "Points per epoch");
  theory_cmd->add_option("--s", th.s, "Surrogate subset size");
  theory_cmd->add_option("--q", th.q, "Inner mini-batch size");
  theory_cmd->add_option("--p", th.params.p, "Dimension (with --b)");
  theory_cmd->add_option("--b", th.b, "Coordinate block size");
  theory_cmd->add_option("--xi", th.params.xi, "Component gradient bound");
  theory_cmd->add_option("--zeta", th.params.zeta, "Per-epoch distance bound");
  theory_cmd->add_option("--eps", th.params.eps, "Target accuracy");
  theory_cmd->add_option("--phi0", th.params.phi0, "Initial gap");
  theory_cmd->add_option("--theta", th.params.theta, "Slack parameter of the theta bounds, in (0, 1)");
  theory_cmd->add_flag("--json", th.as_json, "Machine-readable output");

  CheckFlags ck;
  auto* check = app.add_subcommand("check", "Run the brute-force invariant checks");
  check->add_option("--seed", ck.seed, "Seed");
  check->add_option("--inject-fault", ck.fault, "Scale the inner direction by this factor (test hook)")
      ->group("");
  check->add_flag("--json", ck.as_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return err.get_exit_code() == 0 ? code : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*run_cmd) return cmd_run(run);
    if (*study) return cmd_study(st);
    if (*theory_cmd) return cmd_theory(th);
    if (*check) return cmd_check(ck);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const DataError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kIo;
  } catch (const InfeasibleBudget& err) {
    std::cerr << "infeasible budget: " << err.what() << '\n';
    return kBudget;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kIo;
  }
  return kUsage;
}
