#include "dsad/harness.hpp"

#include "dsad/parallel.hpp"
#include "dsad/solver_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dsad::harness {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::dsad_mcp: return "dsad_mcp";
    case Algorithm::dsad_scad: return "dsad_scad";
    case Algorithm::baseline: return "baseline";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "dsad_mcp") return Algorithm::dsad_mcp;
  if (name == "dsad_scad") return Algorithm::dsad_scad;
  if (name == "baseline") return Algorithm::baseline;
  throw std::invalid_argument("unknown algorithm '" + name + "' (dsad_mcp, dsad_scad, baseline)");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const char* output_label(Algorithm alg) {
  return alg == Algorithm::baseline ? "simplified_baseline" : to_string(alg);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

std::string num17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int solver_threads(const ExperimentConfig& cfg) { return cfg.trials > 1 ? 1 : cfg.threads; }

std::vector<TrialInstance> make_trials(const ExperimentConfig& cfg) {
  std::vector<TrialInstance> trials(cfg.trials);
  parallel_for(trials.size(), cfg.threads,
               [&](std::size_t t) { trials[t] = make_trial(cfg, static_cast<int>(t)); });
  return trials;
}

std::vector<TrialInstance> load_trials(const ExperimentConfig& cfg, const fs::path& data_dir) {
  std::vector<TrialInstance> trials(cfg.trials);
  for (int t = 0; t < cfg.trials; ++t) {
    trials[t] = read_trial(data_dir / trial_dir_name(t));
    trials[t].trial = t;
  }
  return trials;
}

void require_valid(const ExperimentConfig& cfg) {
  const auto problems = check_config(cfg);
  if (problems.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw ConfigParseError(msg);
}

// Theorem conditions are checked on every trial before any output exists.
void validate_trials(const ExperimentConfig& cfg, Algorithm alg,
                     const std::vector<TrialInstance>& trials) {
  if (alg == Algorithm::baseline) return;
  for (const auto& inst : trials) {
    const SolverConfig sc = solver_config(cfg, alg, inst.data);
    ConfigReport report = validate_config(sc, inst.data, inst.graph);
    if (!report.ok) throw ConfigError(report);
  }
}

std::string summary_csv(Algorithm alg, const std::vector<AlgorithmRun>& runs) {
  std::ostringstream out;
  out << "trial,algorithm,iterations,termination,mse,network_mse,recognition_accuracy,"
         "coverage_gap,objective,consensus_residual\n";
  MetricReport mean;
  double iters = 0.0;
  double obj = 0.0;
  double cons = 0.0;
  for (std::size_t t = 0; t < runs.size(); ++t) {
    const AlgorithmRun& r = runs[t];
    const IterationRecord last = r.records.empty() ? IterationRecord{} : r.records.back();
    out << t << ',' << output_label(alg) << ',' << last.k << ',' << r.termination << ','
        << format_number(r.final_metrics.mse) << ',' << format_number(r.final_metrics.network_mse)
        << ',' << format_number(r.final_metrics.recognition_accuracy) << ','
        << format_number(r.final_metrics.quantile_coverage_gap) << ','
        << format_number(last.objective) << ',' << format_number(last.consensus_residual) << '\n';
    mean.mse += r.final_metrics.mse;
    mean.network_mse += r.final_metrics.network_mse;
    mean.recognition_accuracy += r.final_metrics.recognition_accuracy;
    mean.quantile_coverage_gap += r.final_metrics.quantile_coverage_gap;
    iters += static_cast<double>(last.k);
    obj += last.objective;
    cons += last.consensus_residual;
  }
  const double n = static_cast<double>(runs.size());
  out << "mean," << output_label(alg) << ',' << format_number(iters / n) << ",," << format_number(mean.mse / n)
      << ',' << format_number(mean.network_mse / n) << ','
      << format_number(mean.recognition_accuracy / n) << ','
      << format_number(mean.quantile_coverage_gap / n) << ',' << format_number(obj / n) << ','
      << format_number(cons / n) << '\n';
  return out.str();
}

std::vector<AlgorithmRun> run_trials(const ExperimentConfig& cfg,
                                     const std::vector<TrialInstance>& trials, Algorithm alg) {
  std::vector<AlgorithmRun> runs(trials.size());
  parallel_for(trials.size(), cfg.threads,
               [&](std::size_t t) { runs[t] = run_algorithm(cfg, trials[t], alg); });
  return runs;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, int trial, SeedRole role) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ static_cast<std::uint64_t>(trial));
  return splitmix64(h ^ (static_cast<std::uint64_t>(role) << 56));
}

fs::path trial_dir_name(int trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%03d", trial);
  return buf;
}

TrialInstance make_trial(const ExperimentConfig& cfg, int trial) {
  TrialInstance inst;
  inst.trial = trial;
  const auto seed = [&](SeedRole r) { return derive_seed(cfg.base_seed, trial, r); };
  if (cfg.num_nodes == 1) {
    inst.graph = Graph::from_edges(1, {});
  } else {
    inst.graph = random_geometric_graph(cfg.num_nodes, cfg.side, cfg.radius, cfg.degree_min,
                                        cfg.degree_max, seed(SeedRole::topology));
  }
  inst.truth = with_quantile_offset(sparse_truth(cfg.num_features, cfg.num_active, cfg.coef_value,
                                                 cfg.noise_std, seed(SeedRole::support)),
                                    cfg.tau);
  inst.data.reserve(cfg.num_nodes);
  for (int l = 0; l < cfg.num_nodes; ++l) {
    const Eigen::MatrixXd design = gen_design(cfg.samples_per_node, cfg.num_features, cfg.corr,
                                              seed(SeedRole::design) + l);
    inst.data.push_back(gen_node_data(design, inst.truth, seed(SeedRole::noise) + l));
  }
  return inst;
}

SolverConfig solver_config(const ExperimentConfig& cfg, Algorithm alg,
                           const std::vector<NodeData>& data) {
  if (alg == Algorithm::baseline) throw std::invalid_argument("baseline has no solver config");
  SolverConfig sc;
  sc.tau = cfg.tau;
  sc.penalty.kind = alg == Algorithm::dsad_mcp ? PenaltyKind::mcp : PenaltyKind::scad;
  sc.penalty.lambda = cfg.lambda;
  sc.penalty.gamma = alg == Algorithm::dsad_mcp ? cfg.gamma_mcp : cfg.gamma_scad;
  int max_samples = 0;
  for (const auto& d : data) max_samples = std::max(max_samples, d.num_samples());
  const double omega =
      cfg.omega ? *cfg.omega : compute_omega(data, cfg.tau, cfg.lambda, max_samples);
  sc.omega = omega;
  sc.schedule.beta = cfg.beta;
  sc.schedule.c = cfg.c ? *cfg.c : std::sqrt(1.5) / cfg.beta;
  sc.schedule.d = cfg.d ? *cfg.d : std::sqrt(20.0) * omega / cfg.beta;
  sc.max_iterations = cfg.max_iterations;
  sc.consensus_tol = cfg.consensus_tol;
  sc.stationarity_tol = cfg.stationarity_tol;
  sc.num_threads = solver_threads(cfg);
  return sc;
}

BaselineConfig baseline_config(const ExperimentConfig& cfg) {
  BaselineConfig bc;
  bc.tau = cfg.tau;
  bc.lambda = cfg.lambda;
  bc.step_c0 = cfg.baseline_step;
  bc.step_decay = cfg.baseline_decay;
  bc.max_iterations = cfg.max_iterations;
  bc.num_threads = solver_threads(cfg);
  return bc;
}

AlgorithmRun run_algorithm(const ExperimentConfig& cfg, const TrialInstance& inst,
                           Algorithm alg) {
  AlgorithmRun out;
  out.algorithm = alg;
  const double tau = cfg.tau;
  if (alg == Algorithm::baseline) {
    BaselineResult res = run_baseline(
        baseline_config(cfg), inst.data, inst.graph,
        [&](std::span<const Eigen::VectorXd> w, const IterationRecord&) {
          out.curve.push_back(evaluate(w, inst.truth, tau, inst.data));
        });
    out.records = std::move(res.records);
    out.final_w = std::move(res.w);
    out.termination = to_string(Termination::budget);
  } else {
    DsadSolver solver(solver_config(cfg, alg, inst.data), inst.graph, inst.data);
    RunResult res = solver.run([&](const SolverState& s, const IterationRecord&) {
      out.curve.push_back(evaluate(s.w, inst.truth, tau, inst.data));
    });
    out.records = std::move(res.records);
    out.final_w = std::move(res.state.w);
    out.termination = to_string(res.reason);
  }
  out.final_metrics = evaluate(out.final_w, inst.truth, tau, inst.data);
  return out;
}

void write_trial(const fs::path& dir, const TrialInstance& inst, const ExperimentConfig& cfg) {
  make_dir(dir);
  save_edge_list(dir / "graph.txt", inst.graph);
  for (std::size_t l = 0; l < inst.data.size(); ++l) {
    const NodeData& d = inst.data[l];
    std::string text;
    const int p = d.num_features();
    for (int i = 0; i < d.num_samples(); ++i) {
      for (int j = 0; j < p; ++j) {
        text += num17(d.design(i, j));
        text += ',';
      }
      text += num17(d.response(i));
      text += '\n';
    }
    char name[32];
    std::snprintf(name, sizeof name, "node_%03zu.csv", l);
    write_text(dir / name, text);
  }
  json manifest;
  manifest["trial"] = inst.trial;
  manifest["base_seed"] = cfg.base_seed;
  manifest["seeds"] = {
      {"topology", derive_seed(cfg.base_seed, inst.trial, SeedRole::topology)},
      {"support", derive_seed(cfg.base_seed, inst.trial, SeedRole::support)},
      {"design", derive_seed(cfg.base_seed, inst.trial, SeedRole::design)},
      {"noise", derive_seed(cfg.base_seed, inst.trial, SeedRole::noise)},
  };
  manifest["num_nodes"] = inst.graph.num_nodes();
  manifest["num_edges"] = inst.graph.num_edges();
  manifest["samples_per_node"] = cfg.samples_per_node;
  manifest["num_features"] = cfg.num_features;
  manifest["corr"] = cfg.corr;
  manifest["tau"] = cfg.tau;
  std::vector<double> coef(inst.truth.coefficients.data(),
                           inst.truth.coefficients.data() + inst.truth.coefficients.size());
  manifest["truth"] = {{"coefficients", coef},
                       {"active_set", inst.truth.active_set},
                       {"noise_std", inst.truth.noise_std},
                       {"tau_quantile_offset", inst.truth.tau_quantile_offset}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

TrialInstance read_trial(const fs::path& dir) {
  TrialInstance inst;
  const json manifest = json::parse(read_text(dir / "manifest.json"));
  inst.trial = manifest.at("trial").get<int>();
  inst.graph = load_edge_list(dir / "graph.txt");
  const auto& truth = manifest.at("truth");
  const auto coef = truth.at("coefficients").get<std::vector<double>>();
  inst.truth.coefficients = Eigen::Map<const Eigen::VectorXd>(coef.data(), coef.size());
  inst.truth.active_set = truth.at("active_set").get<std::vector<int>>();
  inst.truth.noise_std = truth.at("noise_std").get<double>();
  inst.truth.tau_quantile_offset = truth.at("tau_quantile_offset").get<double>();

  const int p = static_cast<int>(coef.size());
  for (int l = 0; l < inst.graph.num_nodes(); ++l) {
    char name[32];
    std::snprintf(name, sizeof name, "node_%03d.csv", l);
    std::istringstream in(read_text(dir / name));
    std::vector<double> values;
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string cell;
      int cols = 0;
      while (std::getline(row, cell, ',')) {
        values.push_back(std::stod(cell));
        ++cols;
      }
      if (cols != p + 1) {
        throw std::runtime_error(name + std::string(": expected ") + std::to_string(p + 1) +
                                 " columns, got " + std::to_string(cols));
      }
      ++rows;
    }
    Eigen::MatrixXd raw(rows, p);
    Eigen::VectorXd y(rows);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < p; ++j) raw(i, j) = values[static_cast<std::size_t>(i) * (p + 1) + j];
      y(i) = values[static_cast<std::size_t>(i) * (p + 1) + p];
    }
    inst.data.push_back(with_intercept(raw, std::move(y)));
  }
  return inst;
}

std::string cmd_generate(const ExperimentConfig& cfg) {
  require_valid(cfg);
  const auto trials = make_trials(cfg);
  for (const auto& inst : trials) write_trial(cfg.output_dir / trial_dir_name(inst.trial), inst, cfg);
  std::ostringstream report;
  report << "generated " << trials.size() << " trial(s) of " << cfg.num_nodes << " nodes x "
         << cfg.samples_per_node << " rows under " << cfg.output_dir.string() << '\n';
  return report.str();
}

std::string cmd_run(const ExperimentConfig& cfg, Algorithm alg,
                    const std::optional<fs::path>& data_dir) {
  require_valid(cfg);
  const auto trials = data_dir ? load_trials(cfg, *data_dir) : make_trials(cfg);
  validate_trials(cfg, alg, trials);
  const auto runs = run_trials(cfg, trials, alg);

  const fs::path dir = cfg.output_dir / output_label(alg);
  make_dir(dir);
  for (std::size_t t = 0; t < runs.size(); ++t) {
    std::ostringstream log;
    write_iteration_log(log, runs[t].records, runs[t].curve);
    write_text(dir / (trial_dir_name(static_cast<int>(t)).string() + ".csv"), log.str());
  }
  const std::string summary = summary_csv(alg, runs);
  write_text(dir / "summary.csv", summary);
  return summary;
}

std::string cmd_compare(const ExperimentConfig& cfg) {
  require_valid(cfg);
  const auto trials = make_trials(cfg);
  const Algorithm algs[] = {Algorithm::dsad_mcp, Algorithm::dsad_scad, Algorithm::baseline};
  for (Algorithm alg : algs) validate_trials(cfg, alg, trials);

  std::ostringstream csv;
  csv << "k,alg,mse,recog,net_mse\n";
  std::vector<ChartSeries> mse_series, recog_series, net_series;
  std::ostringstream report;
  report << "alg,mse,recognition_accuracy,network_mse,coverage_gap\n";
  for (Algorithm alg : algs) {
    const auto runs = run_trials(cfg, trials, alg);
    std::size_t len = 0;
    for (const auto& r : runs) len = std::max(len, r.curve.size());
    ChartSeries ms{output_label(alg), {}, {}}, rs = ms, ns = ms;
    for (std::size_t i = 0; i < len; ++i) {
      MetricReport mean;
      for (const auto& r : runs) {
        // runs that stopped early hold their final value
        const MetricReport& m = r.curve.empty() ? r.final_metrics : r.curve[std::min(i, r.curve.size() - 1)];
        mean.mse += m.mse;
        mean.recognition_accuracy += m.recognition_accuracy;
        mean.network_mse += m.network_mse;
      }
      const double n = static_cast<double>(runs.size());
      mean.mse /= n;
      mean.recognition_accuracy /= n;
      mean.network_mse /= n;
      const double k = static_cast<double>(i + 1);
      csv << i + 1 << ',' << output_label(alg) << ',' << format_number(mean.mse) << ','
          << format_number(mean.recognition_accuracy) << ',' << format_number(mean.network_mse)
          << '\n';
      ms.x.push_back(k);
      ms.y.push_back(mean.mse);
      rs.x.push_back(k);
      rs.y.push_back(mean.recognition_accuracy);
      ns.x.push_back(k);
      ns.y.push_back(mean.network_mse);
    }
    MetricReport fin;
    for (const auto& r : runs) {
      fin.mse += r.final_metrics.mse;
      fin.recognition_accuracy += r.final_metrics.recognition_accuracy;
      fin.network_mse += r.final_metrics.network_mse;
      fin.quantile_coverage_gap += r.final_metrics.quantile_coverage_gap;
    }
    const double n = static_cast<double>(runs.size());
    report << output_label(alg) << ',' << format_number(fin.mse / n) << ','
           << format_number(fin.recognition_accuracy / n) << ','
           << format_number(fin.network_mse / n) << ','
           << format_number(fin.quantile_coverage_gap / n) << '\n';
    mse_series.push_back(std::move(ms));
    recog_series.push_back(std::move(rs));
    net_series.push_back(std::move(ns));
  }

  make_dir(cfg.output_dir);
  write_text(cfg.output_dir / "compare.csv", csv.str());
  write_svg_chart(cfg.output_dir / "mse.svg", "MSE", "mse", mse_series, true);
  write_svg_chart(cfg.output_dir / "recog.svg", "Recognition accuracy", "accuracy", recog_series);
  write_svg_chart(cfg.output_dir / "net_mse.svg", "Network MSE", "network mse", net_series, true);
  return report.str();
}

std::string cmd_validate(const ExperimentConfig& cfg, bool& ok) {
  std::ostringstream report;
  ok = true;
  const auto problems = check_config(cfg);
  if (!problems.empty()) {
    ok = false;
    for (const auto& p : problems) report << "invalid: " << p << '\n';
    return report.str();
  }
  const auto trials = make_trials(cfg);
  for (Algorithm alg : {Algorithm::dsad_mcp, Algorithm::dsad_scad}) {
    for (const auto& inst : trials) {
      const SolverConfig sc = solver_config(cfg, alg, inst.data);
      const ConfigReport r = validate_config(sc, inst.data, inst.graph);
      if (!r.ok || inst.trial == 0) {
        report << "[" << to_string(alg) << ", trial " << inst.trial << "] c = " << format_number(sc.schedule.c) << ", d = "
               << format_number(sc.schedule.d) << ", beta = " << format_number(sc.schedule.beta)
               << ": " << r.summary();
      }
      if (!r.ok) ok = false;
    }
  }
  report << (ok ? "all trials pass\n" : "validation failed\n");
  return report.str();
}

}  // namespace dsad::harness
