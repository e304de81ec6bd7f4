#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <thread>

#include "cheapsvrg/checks.hpp"
#include "cheapsvrg/harness.hpp"
#include "cheapsvrg/theory.hpp"

namespace py = pybind11;
using namespace cheapsvrg;

namespace {

py::object maybe(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::dict point_dict(const TracePoint& p) {
  py::dict d;
  d["epoch"] = p.epoch;
  d["objective"] = p.objective;
  d["gap"] = maybe(p.gap);
  d["distance"] = maybe(p.distance);
  d["gradients"] = p.gradients;
  d["passes"] = p.passes;
  return d;
}

py::dict trace_dict(const Trace& t) {
  py::list points;
  for (const auto& p : t.points) points.append(point_dict(p));
  py::dict d;
  d["points"] = points;
  d["final_iterate"] = t.final_iterate;
  d["diverged"] = t.diverged;
  return d;
}

py::dict row_dict(const TraceRow& r) {
  py::dict d;
  d["algorithm"] = r.algorithm;
  d["config_id"] = r.config_id;
  d["run_id"] = r.run_id;
  d["epoch"] = r.epoch;
  d["passes"] = r.passes;
  d["objective"] = r.objective;
  d["gap"] = maybe(r.gap);
  d["distance"] = maybe(r.distance);
  d["diverged"] = r.diverged;
  return d;
}

Objective make_objective(const std::string& name, double lambda) {
  if (name == "ls") return Objective::least_squares();
  if (name == "logistic") return Objective::logistic(lambda);
  throw std::invalid_argument("objective must be 'ls' or 'logistic', got '" + name + "'");
}

LipschitzMode make_mode(const std::string& name) {
  if (name == "spectral") return LipschitzMode::Spectral;
  if (name == "component") return LipschitzMode::Component;
  throw std::invalid_argument("lipschitz must be 'spectral' or 'component', got '" + name + "'");
}

AlgorithmSpec make_spec(const py::dict& d) {
  AlgorithmSpec a;
  a.algo = parse_algorithm(d["algo"].cast<std::string>());
  a.label = d.contains("label") ? d["label"].cast<std::string>() : algorithm_name(a.algo);
  if (d.contains("s")) a.cfg.s = d["s"].cast<std::size_t>();
  if (d.contains("q")) a.cfg.q = d["q"].cast<std::size_t>();
  if (d.contains("b")) a.cfg.b = d["b"].cast<std::size_t>();
  if (d.contains("K")) a.cfg.K = d["K"].cast<std::size_t>();
  if (d.contains("T")) a.cfg.T = d["T"].cast<std::size_t>();
  if (d.contains("eta_c")) a.eta_c = d["eta_c"].cast<double>();
  if (d.contains("eta")) a.eta_abs = d["eta"].cast<double>();
  if (d.contains("sgd_steps")) a.sgd_steps = d["sgd_steps"].cast<std::size_t>();
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CheapSVRG optimizers, bounds and experiment harness";
  m.attr("__version__") = kVersion;

  py::register_exception<DataError>(m, "DataError", PyExc_OSError);
  py::register_exception<InfeasibleBudget>(m, "InfeasibleBudget", PyExc_ValueError);
  py::register_exception<theory::InfeasibleStep>(m, "InfeasibleStep", PyExc_ValueError);
  py::register_exception<theory::NoConvergence>(m, "NoConvergence", PyExc_ValueError);

  m.def(
      "generate",
      [](std::size_t n, std::size_t p, double noise, std::uint64_t seed) {
        Instance inst = generate_regression_instance({n, p, noise, seed});
        return py::make_tuple(inst.data.features, inst.data.targets, inst.w_star);
      },
      py::arg("n"), py::arg("p"), py::arg("noise") = 0.0, py::arg("seed") = 0,
      "Synthetic least-squares instance: returns (X, y, w_star).");

  m.def(
      "load_dataset",
      [](const std::string& path, const std::string& format, bool normalize, bool binary_labels,
         std::size_t num_features) {
        LoadOptions opts;
        if (format == "svmlight") {
          opts.format = DataFormat::SvmLight;
        } else if (format != "csv") {
          throw std::invalid_argument("format must be 'csv' or 'svmlight'");
        }
        opts.normalize_rows = normalize;
        if (binary_labels) opts.labels = binary_label_map();
        opts.num_features = num_features;
        Dataset d = load_dataset(path, opts);
        return py::make_tuple(d.features, d.targets);
      },
      py::arg("path"), py::arg("format") = "csv", py::arg("normalize") = false,
      py::arg("binary_labels") = false, py::arg("num_features") = 0);

  m.def(
      "objective_value",
      [](const Matrix& x, const Vector& y, const Vector& w, const std::string& objective, double lambda) {
        return objective_value(make_objective(objective, lambda), Dataset(x, y), w);
      },
      py::arg("X"), py::arg("y"), py::arg("w"), py::arg("objective") = "ls", py::arg("lam") = 0.0);
  m.def(
      "full_gradient",
      [](const Matrix& x, const Vector& y, const Vector& w, const std::string& objective, double lambda) {
        return full_gradient(make_objective(objective, lambda), Dataset(x, y), w);
      },
      py::arg("X"), py::arg("y"), py::arg("w"), py::arg("objective") = "ls", py::arg("lam") = 0.0);
  m.def(
      "component_gradient",
      [](const Matrix& x, const Vector& y, std::size_t i, const Vector& w, const std::string& objective,
         double lambda) {
        const Dataset d(x, y);
        if (i >= d.samples()) throw py::index_error("component index out of range");
        return component_gradient(make_objective(objective, lambda), d, i, w);
      },
      py::arg("X"), py::arg("y"), py::arg("i"), py::arg("w"), py::arg("objective") = "ls",
      py::arg("lam") = 0.0);
  m.def(
      "estimate_constants",
      [](const Matrix& x, const Vector& y, const std::string& objective, double lambda) {
        const auto c = estimate_constants(make_objective(objective, lambda), Dataset(x, y));
        py::dict d;
        d["L"] = c.L;
        d["gamma"] = c.gamma;
        d["L_full"] = c.L_full;
        return d;
      },
      py::arg("X"), py::arg("y"), py::arg("objective") = "ls", py::arg("lam") = 0.0);

  m.def(
      "run",
      [](const std::string& algo, const Matrix& x, const Vector& y, std::optional<double> eta, double eta_c,
         std::size_t s, std::size_t q, std::size_t b, std::size_t K, std::size_t T, std::size_t sgd_steps,
         std::uint64_t seed, std::optional<Vector> w0, std::optional<Vector> w_star, const std::string& objective,
         double lambda, const std::string& lipschitz) {
        const Dataset d(x, y);
        const Objective obj = make_objective(objective, lambda);
        AlgorithmSpec spec;
        spec.algo = parse_algorithm(algo);
        spec.label = algo;
        spec.eta_abs = eta;
        spec.eta_c = eta_c;
        spec.cfg.s = s;
        spec.cfg.q = q;
        spec.cfg.b = b;
        spec.cfg.K = K > 0 ? K : 2 * d.samples();
        spec.cfg.T = T;
        spec.sgd_steps = sgd_steps;
        RunOptions opts;
        opts.reference = w_star;
        const double L = step_lipschitz(obj, d, make_mode(lipschitz));
        const Vector start = w0 ? *w0 : Vector::Zero(static_cast<Eigen::Index>(d.dimension()));
        Trace t;
        {
          py::gil_scoped_release release;
          t = run_algorithm(spec, obj, d, start, L, seed, opts);
        }
        py::dict out = trace_dict(t);
        out["L"] = L;
        return out;
      },
      py::arg("algo"), py::arg("X"), py::arg("y"), py::arg("eta") = py::none(), py::arg("eta_c") = 300.0,
      py::arg("s") = 1, py::arg("q") = 1, py::arg("b") = 0, py::arg("K") = 0, py::arg("T") = 10,
      py::arg("sgd_steps") = 0, py::arg("seed") = 1, py::arg("w0") = py::none(), py::arg("w_star") = py::none(),
      py::arg("objective") = "ls", py::arg("lam") = 0.0, py::arg("lipschitz") = "spectral",
      "Runs one algorithm (sgd, svrg, cheap, minibatch, cheaper). K = 0 means 2n.");

  m.def("rho_basic", &theory::rho_basic, py::arg("eta"), py::arg("L"), py::arg("gamma"), py::arg("K"),
        py::arg("s"));
  m.def("rho_minibatch", &theory::rho_minibatch, py::arg("eta"), py::arg("L"), py::arg("gamma"), py::arg("K"),
        py::arg("s"), py::arg("q"));
  m.def("rho_coordinate", &theory::rho_coordinate, py::arg("eta"), py::arg("L"), py::arg("gamma"), py::arg("K"),
        py::arg("s"), py::arg("p"), py::arg("b"));
  m.def("kappa_basic", &theory::kappa_basic, py::arg("eta"), py::arg("L"), py::arg("s"), py::arg("K"),
        py::arg("zeta"), py::arg("xi"), py::arg("rho"));
  m.def("epochs_needed", &theory::epochs_needed, py::arg("rho"), py::arg("phi0"), py::arg("eps"));
  m.def(
      "gradient_budget",
      [](std::size_t K, std::size_t s, std::size_t q, std::size_t T) {
        const auto g = theory::gradient_budget(K, s, q, T);
        return py::make_tuple(g.exact, g.asymptotic);
      },
      py::arg("K"), py::arg("s"), py::arg("q"), py::arg("T"), "Returns (exact, asymptotic).");
  m.def(
      "feasibility_check",
      [](double eta, double L, double gamma, std::size_t K, std::size_t s, std::size_t q, std::size_t b,
         std::size_t p, double xi, double zeta, double theta, double eps, double phi0) {
        theory::TheoryParams params;
        params.L = L;
        params.gamma = gamma;
        params.xi = xi;
        params.zeta = zeta;
        params.theta = theta;
        params.eps = eps;
        params.phi0 = phi0;
        params.p = p;
        EpochConfig cfg;
        cfg.eta = eta;
        cfg.K = K;
        cfg.s = s;
        cfg.q = q;
        cfg.b = b;
        const auto r = theory::feasibility_check(params, cfg);
        auto opt = [](double x) { return std::isnan(x) ? py::none() : py::cast(x); };
        py::dict d;
        d["variant"] = r.variant;
        d["rho"] = opt(r.rho);
        d["kappa"] = opt(r.kappa);
        d["eta_max"] = r.eta_max;
        d["eta_stability"] = r.eta_stability;
        d["eta_max_theta"] = r.eta_max_theta;
        d["K_min"] = r.K_min;
        d["K_min_theta"] = r.K_min_theta;
        d["T_min"] = r.T_min;
        d["grads_per_epoch"] = r.grads_per_epoch;
        d["total_grads"] = r.total_grads;
        d["C1"] = r.c1.pass;
        d["C2"] = r.c2.pass;
        d["C3"] = r.c3.pass;
        d["stable"] = r.stable;
        d["feasible"] = r.feasible;
        d["reason"] = r.reason;
        return d;
      },
      py::arg("eta"), py::arg("L") = 1.0, py::arg("gamma") = 1.0, py::arg("K") = 1000, py::arg("s") = 1,
      py::arg("q") = 1, py::arg("b") = 0, py::arg("p") = 0, py::arg("xi") = 0.0, py::arg("zeta") = 0.0,
      py::arg("theta") = 0.5, py::arg("eps") = 1e-3, py::arg("phi0") = 1.0);

  m.def(
      "plan_budget",
      [](std::uint64_t total, double perc, std::size_t s, std::size_t q, std::size_t n, const std::string& algo) {
        const auto p = plan_budget(total, perc, s, q, n, parse_algorithm(algo));
        py::dict d;
        d["T"] = p.T;
        d["K"] = p.K;
        d["outer_cost"] = p.outer_cost;
        d["inner_cost"] = p.inner_cost;
        d["planned_spend"] = p.planned_spend();
        return d;
      },
      py::arg("total_grads"), py::arg("perc"), py::arg("s"), py::arg("q"), py::arg("n"),
      py::arg("algo") = "cheap");

  py::class_<StudyResult>(m, "StudyResult")
      .def("common_passes", &StudyResult::common_passes)
      .def("median_objective_at", &StudyResult::median_objective_at, py::arg("label"), py::arg("passes"))
      .def("write_traces", &write_traces, py::arg("path"))
      .def("rows",
           [](const StudyResult& r) {
             py::list out;
             for (const auto& row : trace_rows(r)) out.append(row_dict(row));
             return out;
           })
      .def("summaries",
           [](const StudyResult& r) {
             py::list out;
             for (const auto& s : r.summaries) {
               py::dict d;
               d["label"] = s.label;
               d["grid"] = s.grid;
               d["median_objective"] = s.median_objective;
               d["median_distance"] = s.median_distance;
               d["final_passes"] = s.final_passes;
               out.append(d);
             }
             return out;
           })
      .def_property_readonly("manifest", &study_manifest);

  m.def(
      "run_study",
      [](std::size_t n, std::size_t p, double noise, const std::vector<py::dict>& algorithms, std::size_t R,
         std::size_t E, std::uint64_t seed, unsigned threads) {
        StudyConfig cfg;
        cfg.instance = InstanceSpec{n, p, noise, 0};
        for (const auto& a : algorithms) cfg.algorithms.push_back(make_spec(a));
        cfg.instances = R;
        cfg.executions = E;
        cfg.master_seed = seed;
        cfg.threads = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
        py::gil_scoped_release release;
        return run_study(cfg);
      },
      py::arg("n"), py::arg("p"), py::arg("noise"), py::arg("algorithms"), py::arg("R") = 1, py::arg("E") = 1,
      py::arg("seed") = 1, py::arg("threads") = 0,
      "algorithms: dicts with 'algo' and optional label, s, q, b, K, T, eta_c, eta, sgd_steps.");

  m.def(
      "read_traces",
      [](const std::string& path) {
        py::list out;
        for (const auto& row : read_traces(path)) out.append(row_dict(row));
        return out;
      },
      py::arg("path"));
  m.attr("TRACE_HEADER") = kTraceHeader;

  m.def(
      "run_checks",
      [](std::uint64_t seed) {
        checks::CheckOptions opts;
        opts.seed = seed;
        py::list out;
        for (const auto& r : checks::run_all_checks(opts)) {
          py::dict d;
          d["name"] = r.name;
          d["max_deviation"] = r.max_deviation;
          d["tolerance"] = r.tolerance;
          d["pass"] = r.pass;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1);

  m.def(
      "sample_subset",
      [](std::size_t n, std::size_t s, std::uint64_t seed) {
        SeededRng rng(seed);
        const IndexSet set = sample_subset(n, s, rng);
        return std::vector<std::size_t>(set.begin(), set.end());
      },
      py::arg("n"), py::arg("s"), py::arg("seed"));
  m.def(
      "spectral_extremes",
      [](const Matrix& x) {
        const auto r = spectral_extremes(x);
        return py::make_tuple(r.sigma_max, r.sigma_min, r.rank);
      },
      py::arg("X"), "Returns (sigma_max, smallest nonzero sigma, rank).");
}
