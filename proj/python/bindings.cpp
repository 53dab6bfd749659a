#include "dsad/baseline.hpp"
#include "dsad/harness.hpp"
#include "dsad/metrics.hpp"
#include "dsad/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace dsad;

namespace {

py::dict record_dict(const IterationRecord& r) {
  py::dict d;
  d["k"] = r.k;
  d["objective"] = r.objective;
  d["aug_lagrangian"] = r.aug_lagrangian ? py::cast(*r.aug_lagrangian) : py::none();
  d["primal_residual"] = r.primal_residual;
  d["consensus_residual"] = r.consensus_residual;
  d["stationarity_residual"] =
      r.stationarity_residual ? py::cast(*r.stationarity_residual) : py::none();
  d["w_step"] = r.w_step;
  return d;
}

py::list records_list(const std::vector<IterationRecord>& records) {
  py::list out;
  for (const auto& r : records) out.append(record_dict(r));
  return out;
}

std::vector<Edge> edges_from(const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Edge> edges;
  for (auto [a, b] : pairs) edges.push_back({a, b});
  return edges;
}

}  // namespace

PYBIND11_MODULE(_dsad, m) {
  m.doc() = "decentralized smoothing ADMM for sparse quantile regression";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<InfeasibleTopology>(m, "InfeasibleTopology", PyExc_RuntimeError);
  py::register_exception<harness::ConfigParseError>(m, "ConfigParseError", PyExc_ValueError);

  // prox
  py::enum_<PenaltyKind>(m, "PenaltyKind")
      .value("mcp", PenaltyKind::mcp)
      .value("scad", PenaltyKind::scad);

  py::class_<PenaltySpec>(m, "PenaltySpec")
      .def(py::init([](PenaltyKind kind, double lam, double gam) { return PenaltySpec{kind, lam, gam}; }),
           py::arg("kind"), py::arg("lam"), py::arg("gamma"))
      .def_readwrite("kind", &PenaltySpec::kind)
      .def_readwrite("lam", &PenaltySpec::lambda)
      .def_readwrite("gamma", &PenaltySpec::gamma)
      .def("validate", &PenaltySpec::validate);

  py::class_<Schedule>(m, "Schedule")
      .def(py::init([](double c, double d, double beta) { return Schedule{c, d, beta}; }),
           py::arg("c") = 1.0, py::arg("d") = 1.0, py::arg("beta") = 1.0)
      .def_readwrite("c", &Schedule::c)
      .def_readwrite("d", &Schedule::d)
      .def_readwrite("beta", &Schedule::beta);

  m.def("check_loss", &check_loss, py::arg("u"), py::arg("tau"));
  m.def("penalty_value", &penalty_value, py::arg("w"), py::arg("spec"));
  m.def("prox_penalty", &prox_penalty, py::arg("a"), py::arg("t"), py::arg("spec"));
  m.def("smooth_abs", &smooth_abs, py::arg("z"), py::arg("mu"));
  m.def("prox_smooth_abs", &prox_smooth_abs, py::arg("x"), py::arg("thresh"), py::arg("mu"));

  // topology
  py::class_<Graph>(m, "Graph")
      .def_static("from_edges",
                  [](int n, const std::vector<std::pair<int, int>>& e) {
                    return Graph::from_edges(n, edges_from(e));
                  },
                  py::arg("num_nodes"), py::arg("edges"))
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("edges",
                             [](const Graph& g) {
                               std::vector<std::pair<int, int>> out;
                               for (const Edge& e : g.edges()) out.emplace_back(e.first, e.second);
                               return out;
                             })
      .def("neighbors", &Graph::neighbors, py::arg("node"))
      .def("degree", &Graph::degree, py::arg("node"))
      .def("is_valid", [](const Graph& g) { return validate(g).ok; });

  m.def("random_geometric_graph", &random_geometric_graph, py::arg("num_nodes"), py::arg("side"),
        py::arg("radius"), py::arg("degree_min"), py::arg("degree_max"), py::arg("seed"));
  m.def("complete_graph", &complete_graph, py::arg("num_nodes"));
  m.def("path_graph", &path_graph, py::arg("num_nodes"));

  // data
  py::class_<NodeData>(m, "NodeData")
      .def_readonly("design", &NodeData::design)
      .def_readonly("response", &NodeData::response)
      .def_property_readonly("num_samples", &NodeData::num_samples)
      .def_property_readonly("num_features", &NodeData::num_features);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("coefficients", &GroundTruth::coefficients)
      .def_readonly("active_set", &GroundTruth::active_set)
      .def_readonly("noise_std", &GroundTruth::noise_std)
      .def_readonly("tau_quantile_offset", &GroundTruth::tau_quantile_offset);

  m.def("with_intercept", &with_intercept, py::arg("raw_design"), py::arg("response"));
  m.def("gen_design", &gen_design, py::arg("num_samples"), py::arg("num_features"),
        py::arg("corr"), py::arg("seed"));
  m.def("gen_node_data", &gen_node_data, py::arg("design"), py::arg("truth"), py::arg("seed"));
  m.def("sparse_truth", &sparse_truth, py::arg("num_features"), py::arg("num_active"),
        py::arg("value"), py::arg("noise_std"), py::arg("seed"));
  m.def("with_quantile_offset", &with_quantile_offset, py::arg("truth"), py::arg("tau"));
  m.def("true_augmented_w", &true_augmented_w, py::arg("truth"), py::arg("tau"));

  // solver
  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("tau", &SolverConfig::tau)
      .def_readwrite("penalty", &SolverConfig::penalty)
      .def_readwrite("schedule", &SolverConfig::schedule)
      .def_readwrite("omega", &SolverConfig::omega)
      .def_readwrite("max_iterations", &SolverConfig::max_iterations)
      .def_readwrite("consensus_tol", &SolverConfig::consensus_tol)
      .def_readwrite("stationarity_tol", &SolverConfig::stationarity_tol)
      .def_readwrite("num_threads", &SolverConfig::num_threads)
      .def_readwrite("enforce_conditions", &SolverConfig::enforce_conditions);

  py::class_<ConfigReport>(m, "ConfigReport")
      .def_readonly("ok", &ConfigReport::ok)
      .def_readonly("violations", &ConfigReport::violations)
      .def_readonly("omega", &ConfigReport::omega)
      .def_readonly("omega_lower_bound", &ConfigReport::omega_lower_bound)
      .def_readonly("warmup_iteration", &ConfigReport::warmup_iteration)
      .def("summary", &ConfigReport::summary);

  m.def("compute_omega",
        [](const std::vector<NodeData>& data, double tau, double lam, int m_) {
          return compute_omega(data, tau, lam, m_);
        },
        py::arg("data"), py::arg("tau"), py::arg("lam"), py::arg("max_samples"));
  m.def("validate_config",
        [](const SolverConfig& c, const std::vector<NodeData>& data, const Graph& g) {
          return validate_config(c, data, g);
        },
        py::arg("config"), py::arg("data"), py::arg("graph"));

  py::class_<DsadSolver>(m, "DsadSolver")
      .def(py::init<SolverConfig, Graph, std::vector<NodeData>>(), py::arg("config"),
           py::arg("graph"), py::arg("data"))
      .def_property_readonly("omega", &DsadSolver::omega)
      .def("validate", &DsadSolver::validate)
      .def(
          "run",
          [](const DsadSolver& s) {
            RunResult r;
            {
              py::gil_scoped_release release;
              r = s.run();
            }
            py::dict out;
            out["w"] = r.state.w;
            out["z"] = r.state.z;
            out["iterations"] = r.state.k;
            out["termination"] = to_string(r.reason);
            out["records"] = records_list(r.records);
            out["objective"] = s.objective(r.state);
            return out;
          },
          "Run to the budget or tolerance; returns a dict with w, z, records.");

  m.def("centralized_objective",
        [](const Eigen::VectorXd& w, const std::vector<NodeData>& data, double tau,
           const PenaltySpec& pen) { return centralized_objective(w, data, tau, pen); },
        py::arg("w"), py::arg("data"), py::arg("tau"), py::arg("penalty"));

  // baseline
  py::enum_<StepDecay>(m, "StepDecay")
      .value("inv_sqrt", StepDecay::inv_sqrt)
      .value("inv_k", StepDecay::inv_k);

  py::class_<BaselineConfig>(m, "BaselineConfig")
      .def(py::init<>())
      .def_readwrite("tau", &BaselineConfig::tau)
      .def_readwrite("lam", &BaselineConfig::lambda)
      .def_readwrite("step_c0", &BaselineConfig::step_c0)
      .def_readwrite("step_decay", &BaselineConfig::step_decay)
      .def_readwrite("max_iterations", &BaselineConfig::max_iterations)
      .def_readwrite("num_threads", &BaselineConfig::num_threads);

  m.def(
      "run_baseline",
      [](const BaselineConfig& c, const std::vector<NodeData>& data, const Graph& g) {
        BaselineResult r;
        {
          py::gil_scoped_release release;
          r = run_baseline(c, data, g);
        }
        py::dict out;
        out["w"] = r.w;
        out["records"] = records_list(r.records);
        return out;
      },
      py::arg("config"), py::arg("data"), py::arg("graph"));

  // metrics
  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("mse", &MetricReport::mse)
      .def_readonly("network_mse", &MetricReport::network_mse)
      .def_readonly("recognition_accuracy", &MetricReport::recognition_accuracy)
      .def_readonly("quantile_coverage_gap", &MetricReport::quantile_coverage_gap);

  m.def("evaluate",
        [](const std::vector<Eigen::VectorXd>& w, const GroundTruth& truth, double tau,
           const std::vector<NodeData>& data, double eps) {
          return evaluate(w, truth, tau, data, eps);
        },
        py::arg("estimates"), py::arg("truth"), py::arg("tau"), py::arg("data"),
        py::arg("activity_eps") = 0.0);

  // harness
  py::class_<harness::ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("num_nodes", &harness::ExperimentConfig::num_nodes)
      .def_readwrite("samples_per_node", &harness::ExperimentConfig::samples_per_node)
      .def_readwrite("num_features", &harness::ExperimentConfig::num_features)
      .def_readwrite("tau", &harness::ExperimentConfig::tau)
      .def_readwrite("lam", &harness::ExperimentConfig::lambda)
      .def_readwrite("max_iterations", &harness::ExperimentConfig::max_iterations)
      .def_readwrite("trials", &harness::ExperimentConfig::trials)
      .def_readwrite("base_seed", &harness::ExperimentConfig::base_seed)
      .def_readwrite("threads", &harness::ExperimentConfig::threads);

  py::class_<harness::TrialInstance>(m, "TrialInstance")
      .def_readonly("trial", &harness::TrialInstance::trial)
      .def_readonly("graph", &harness::TrialInstance::graph)
      .def_readonly("truth", &harness::TrialInstance::truth)
      .def_readonly("data", &harness::TrialInstance::data);

  m.def("load_config", &harness::load_config, py::arg("path"));
  m.def("make_trial", &harness::make_trial, py::arg("config"), py::arg("trial"));
  m.def(
      "solver_config",
      [](const harness::ExperimentConfig& c, const std::string& alg,
         const std::vector<NodeData>& data) {
        return harness::solver_config(c, harness::algorithm_from_string(alg), data);
      },
      py::arg("config"), py::arg("algorithm"), py::arg("data"));
}
