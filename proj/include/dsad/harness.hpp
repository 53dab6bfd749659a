#pragma once

#include "dsad/baseline.hpp"
#include "dsad/metrics.hpp"
#include "dsad/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsad::harness {

/// Flat `key = value` experiment description. '#' starts a comment; unknown
/// keys are errors. Defaults follow the 30-node simulation setting.
struct ExperimentConfig {
  // topology
  int num_nodes = 30;
  double side = 2.5;
  double radius = 0.8;
  int degree_min = 2;
  int degree_max = 10;
  // data
  int samples_per_node = 500;
  int num_features = 18;
  double corr = 0.5;
  int num_active = 3;
  double coef_value = 1.0;
  double noise_std = 0.2;
  // solver
  double tau = 0.75;
  double lambda = 0.055;
  double gamma_mcp = 2.4;
  double gamma_scad = 3.7;
  std::optional<double> c;      // auto: sqrt(3/2) / beta
  std::optional<double> d;      // auto: sqrt(20) * omega / beta
  double beta = 1.0;
  std::optional<double> omega;  // auto: compute_omega()
  int max_iterations = 3000;
  double consensus_tol = 0.0;
  double stationarity_tol = 0.0;
  // simplified baseline
  double baseline_step = 0.1;
  StepDecay baseline_decay = StepDecay::inv_sqrt;
  // protocol
  int trials = 1;
  std::uint64_t base_seed = 1;
  int threads = 1;
  std::filesystem::path output_dir = "out";
};

class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Keys that must appear in every config file.
const std::vector<std::string>& required_keys();

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
/// Range checks that do not need data (tau in (0,1), positive sizes, ...).
/// Returns the list of problems, empty when fine.
std::vector<std::string> check_config(const ExperimentConfig& cfg);

enum class Algorithm { dsad_mcp, dsad_scad, baseline };
const char* to_string(Algorithm alg);
Algorithm algorithm_from_string(const std::string& name);

/// Seed roles; derive_seed(base, trial, role) mixes all three with splitmix64
/// so that streams never coincide across roles or trials. Node l of a trial
/// uses derive_seed(...) + l.
enum class SeedRole : std::uint64_t { topology = 1, support = 2, design = 3, noise = 4 };
std::uint64_t derive_seed(std::uint64_t base, int trial, SeedRole role);

struct TrialInstance {
  int trial = 0;
  Graph graph;
  GroundTruth truth;
  std::vector<NodeData> data;
};

TrialInstance make_trial(const ExperimentConfig& cfg, int trial);

SolverConfig solver_config(const ExperimentConfig& cfg, Algorithm alg,
                           const std::vector<NodeData>& data);
BaselineConfig baseline_config(const ExperimentConfig& cfg);

struct AlgorithmRun {
  Algorithm algorithm = Algorithm::dsad_mcp;
  std::vector<IterationRecord> records;
  std::vector<MetricReport> curve;  // per iteration, aligned with records
  std::vector<Eigen::VectorXd> final_w;
  MetricReport final_metrics;
  std::string termination;
};

/// Runs one algorithm on one trial. Throws ConfigError if DSAD validation fails.
AlgorithmRun run_algorithm(const ExperimentConfig& cfg, const TrialInstance& instance,
                           Algorithm alg);

// Commands. Each writes under `cfg.output_dir` and returns a printable report.
std::string cmd_generate(const ExperimentConfig& cfg);
std::string cmd_run(const ExperimentConfig& cfg, Algorithm alg,
                    const std::optional<std::filesystem::path>& data_dir = std::nullopt);
std::string cmd_compare(const ExperimentConfig& cfg);
/// Returns the report; `ok` is set false on any violation.
std::string cmd_validate(const ExperimentConfig& cfg, bool& ok);

// Dataset directory layout written by cmd_generate (one per trial):
//   trial_NNN/graph.txt, trial_NNN/node_NNN.csv, trial_NNN/manifest.json
void write_trial(const std::filesystem::path& dir, const TrialInstance& instance,
                 const ExperimentConfig& cfg);
TrialInstance read_trial(const std::filesystem::path& dir);
std::filesystem::path trial_dir_name(int trial);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line chart.
void write_svg_chart(const std::filesystem::path& path, const std::string& title,
                     const std::string& y_label, const std::vector<ChartSeries>& series,
                     bool log_y = false);

}  // namespace dsad::harness
