#pragma once

#include "dsad/solver.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace dsad {

enum class StepDecay { inv_sqrt, inv_k };
const char* to_string(StepDecay decay);
StepDecay step_decay_from_string(const std::string& name);

/// Simplified diffusion-subgradient baseline: Metropolis averaging followed by
/// a subgradient step on (1/M_l) sum rho_tau(y - x'w) + lambda ||w_{1:P}||_1.
/// It stands in for published decentralised quantile-regression comparators
/// and is labelled "simplified baseline" in every output.
struct BaselineConfig {
  double tau = 0.5;
  double lambda = 0.0;
  double step_c0 = 0.1;  // 0 freezes the iterates
  StepDecay step_decay = StepDecay::inv_sqrt;
  int max_iterations = 1000;
  int num_threads = 1;
  bool record_trajectory = false;
};

struct MixingWeights {
  std::vector<std::vector<double>> neighbor;  // aligned with Graph::neighbors(l)
  std::vector<double> self;
};

/// w_lj = 1 / (1 + max(deg_l, deg_j)); w_ll = 1 - sum_j w_lj.
MixingWeights metropolis_weights(const Graph& graph);

std::vector<Eigen::VectorXd> metropolis_combine(const Graph& graph, const MixingWeights& weights,
                                                std::span<const Eigen::VectorXd> w);

struct BaselineResult {
  std::vector<Eigen::VectorXd> w;
  std::vector<IterationRecord> records;  // stationarity and aug_lagrangian unset
  std::vector<std::vector<Eigen::VectorXd>> trajectory;  // filled when requested
};

using BaselineObserver =
    std::function<void(std::span<const Eigen::VectorXd>, const IterationRecord&)>;

BaselineResult run_baseline(const BaselineConfig& cfg, std::span<const NodeData> data,
                            const Graph& graph, const BaselineObserver& observer = {});

}  // namespace dsad
