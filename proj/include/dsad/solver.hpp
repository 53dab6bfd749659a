#pragma once

#include "dsad/prox.hpp"
#include "dsad/synth_data.hpp"
#include "dsad/topology.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dsad {

struct SolverConfig {
  double tau = 0.5;
  PenaltySpec penalty;
  Schedule schedule;
  /// Total-variation weight; nullopt resolves to compute_omega().
  std::optional<double> omega;
  int max_iterations = 1000;
  /// Early exit needs consensus <= consensus_tol and both primal and
  /// stationarity residuals <= stationarity_tol. Setting both to 0 disables it.
  double consensus_tol = 1e-4;
  double stationarity_tol = 1e-4;
  int num_threads = 1;
  /// run() refuses configurations that fail validate_config().
  bool enforce_conditions = true;
};

/// Variables of edge (first, second), first < second. g_first is the copy
/// constrained to equal w_first, g_second the copy of w_second; xi_* are their
/// multipliers.
struct EdgeVariables {
  Eigen::VectorXd g_first;
  Eigen::VectorXd g_second;
  Eigen::VectorXd xi_first;
  Eigen::VectorXd xi_second;
};

struct SolverState {
  std::vector<Eigen::VectorXd> w;    // per node, length P+1
  std::vector<Eigen::VectorXd> z;    // per node, length M_l
  std::vector<Eigen::VectorXd> psi;  // per node, length M_l
  std::vector<EdgeVariables> edges;  // aligned with Graph::edges()
  std::int64_t k = 0;

  friend bool operator==(const SolverState& a, const SolverState& b);
};

struct IterationRecord {
  std::int64_t k = 0;
  double objective = 0.0;
  std::optional<double> aug_lagrangian;
  double primal_residual = 0.0;
  double consensus_residual = 0.0;
  std::optional<double> stationarity_residual;
  double w_step = 0.0;
};

struct KktResiduals {
  double primal = 0.0;
  double consensus = 0.0;
  double stationarity = 0.0;
};

/// max{tau, 1-tau} * max_l (max abs column sum of X_l) + M*lambda + 1.
double compute_omega(std::span<const NodeData> data, double tau, double lambda, int max_samples);

/// Lower bound omega must strictly exceed: the value above without the +1.
double omega_lower_bound(std::span<const NodeData> data, double tau, double lambda,
                         int max_samples);

struct ConfigReport {
  bool ok = true;
  std::vector<std::string> violations;
  double omega = 0.0;
  double omega_lower_bound = 0.0;
  int max_samples = 0;
  bool equal_sample_sizes = true;
  double min_column_norm_sq = 0.0;
  double weak_convexity = 0.0;
  /// First k with d*sqrt(k+1) > M*rho / min column norm^2 (-1 if not computed).
  std::int64_t warmup_iteration = -1;

  std::string summary() const;
};

ConfigReport validate_config(const SolverConfig& cfg, std::span<const NodeData> data,
                             const Graph& graph);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(ConfigReport report);
  const ConfigReport& report() const { return report_; }

 private:
  ConfigReport report_;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t k, int node, const std::string& what);
  std::int64_t iteration() const { return k_; }
  /// Node index, or -1 when raised from an edge block.
  int node() const { return node_; }
  const std::optional<IterationRecord>& last_finite_record() const { return last_; }
  void set_last_finite_record(IterationRecord r) { last_ = r; }

 private:
  std::int64_t k_;
  int node_;
  std::optional<IterationRecord> last_;
};

enum class Termination { budget, tolerance };
const char* to_string(Termination reason);

struct RunResult {
  SolverState state;
  std::vector<IterationRecord> records;
  Termination reason = Termination::budget;
};

using IterationObserver = std::function<void(const SolverState&, const IterationRecord&)>;

/// Decentralized smoothing ADMM for penalised quantile regression over a
/// graph. Each iteration runs, with schedule values for k+1:
///   node blocks (concurrent): Gauss-Seidel w coordinates, z prox, Psi ascent;
///   edge blocks (concurrent): paired g prox, xi ascent.
/// Node blocks read only previous-iteration edge variables; edge blocks read
/// only this iteration's w. Output is identical for any thread count.
class DsadSolver {
 public:
  DsadSolver(SolverConfig cfg, Graph graph, std::vector<NodeData> data);

  const SolverConfig& config() const { return cfg_; }
  const Graph& graph() const { return graph_; }
  std::span<const NodeData> data() const { return data_; }
  double omega() const { return omega_; }
  int num_coefficients() const { return num_coef_; }

  ConfigReport validate() const;
  SolverState init_state() const;

  /// Schedule values used by the iteration that takes `state` from k to k+1.
  ScheduleValues next_schedule(const SolverState& state) const;

  Eigen::VectorXd update_w_node(int node, const SolverState& state,
                                const ScheduleValues& sched) const;
  /// `w_new` is the node's already updated coefficient vector.
  Eigen::VectorXd update_z_node(int node, const Eigen::VectorXd& w_new, const SolverState& state,
                                const ScheduleValues& sched) const;
  /// Paired (g_first, g_second) for edge index `edge`, reading state.w as the
  /// current iteration's coefficients.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> update_edge(std::size_t edge,
                                                          const SolverState& state,
                                                          const ScheduleValues& sched) const;
  /// Psi and xi ascent for every node and edge from the current primal state.
  void update_duals(SolverState& state, const ScheduleValues& sched) const;

  IterationRecord iterate(SolverState& state) const;
  RunResult run(const IterationObserver& observer = {}) const;

  /// Stationarity uses the exact subdifferentials; |z| below the smoothing
  /// level of the last iteration counts as the kink of the check loss.
  KktResiduals kkt_residuals(const SolverState& state) const;
  double augmented_lagrangian(const SolverState& state, const ScheduleValues& sched) const;
  /// Unsmoothed objective: sum_l [sum_i rho_tau(z_li) + M_l P(w_l)]
  ///   + omega * sum_edges ||g_first - g_second||_1.
  double objective(const SolverState& state) const;

 private:
  struct Incidence {
    std::size_t edge;
    bool is_first;
  };

  const Eigen::VectorXd& own_g(const SolverState& s, const Incidence& inc) const;
  const Eigen::VectorXd& own_xi(const SolverState& s, const Incidence& inc) const;
  double node_penalty(const Eigen::VectorXd& w) const;

  SolverConfig cfg_;
  Graph graph_;
  std::vector<NodeData> data_;
  double omega_ = 0.0;
  int num_coef_ = 0;
  std::vector<Eigen::VectorXd> column_norm_sq_;
  std::vector<std::vector<Incidence>> incidence_;
};

/// sum over all samples of rho_tau(y - x'w) + n * P(w), n the pooled sample
/// count. The intercept (last entry) is not penalised.
double centralized_objective(const Eigen::VectorXd& w, std::span<const NodeData> data, double tau,
                             const PenaltySpec& penalty);

}  // namespace dsad
