#include "dsad/baseline.hpp"

#include "dsad/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsad {

const char* to_string(StepDecay decay) {
  return decay == StepDecay::inv_sqrt ? "inv_sqrt" : "inv_k";
}

StepDecay step_decay_from_string(const std::string& name) {
  if (name == "inv_sqrt") return StepDecay::inv_sqrt;
  if (name == "inv_k") return StepDecay::inv_k;
  throw std::invalid_argument("unknown step decay: " + name);
}

MixingWeights metropolis_weights(const Graph& graph) {
  MixingWeights mw;
  const int n = graph.num_nodes();
  mw.neighbor.resize(n);
  mw.self.assign(n, 1.0);
  for (int l = 0; l < n; ++l) {
    for (int j : graph.neighbors(l)) {
      const double weight = 1.0 / (1.0 + std::max(graph.degree(l), graph.degree(j)));
      mw.neighbor[l].push_back(weight);
      mw.self[l] -= weight;
    }
  }
  return mw;
}

std::vector<Eigen::VectorXd> metropolis_combine(const Graph& graph, const MixingWeights& weights,
                                                std::span<const Eigen::VectorXd> w) {
  std::vector<Eigen::VectorXd> out(w.size());
  for (int l = 0; l < graph.num_nodes(); ++l) {
    out[l] = weights.self[l] * w[l];
    const auto& nbrs = graph.neighbors(l);
    for (std::size_t i = 0; i < nbrs.size(); ++i) out[l] += weights.neighbor[l][i] * w[nbrs[i]];
  }
  return out;
}

namespace {

double check_slope(double u, double tau) {
  if (u > 0.0) return tau;
  if (u < 0.0) return tau - 1.0;
  return tau - 0.5;
}

double local_objective(const NodeData& d, const Eigen::VectorXd& w, double tau, double lambda) {
  const Eigen::VectorXd resid = d.response - d.design * w;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < resid.size(); ++i) loss += check_loss(resid(i), tau);
  return loss + d.num_samples() * lambda * w.head(w.size() - 1).lpNorm<1>();
}

}  // namespace

BaselineResult run_baseline(const BaselineConfig& cfg, std::span<const NodeData> data,
                            const Graph& graph, const BaselineObserver& observer) {
  if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) throw std::domain_error("tau must lie in (0,1)");
  if (cfg.step_c0 < 0.0) throw std::invalid_argument("baseline step must be >= 0");
  if (cfg.lambda < 0.0) throw std::invalid_argument("baseline lambda must be >= 0");
  if (data.empty() || graph.num_nodes() != static_cast<int>(data.size())) {
    throw std::invalid_argument("baseline: graph and data sizes differ");
  }
  const auto cols = data.front().design.cols();
  for (const auto& d : data) {
    check_node_data(d);
    if (d.design.cols() != cols) throw std::invalid_argument("inconsistent design widths");
  }

  const MixingWeights weights = metropolis_weights(graph);
  const std::size_t n = data.size();
  BaselineResult result;
  result.w.assign(n, Eigen::VectorXd::Zero(cols));
  if (cfg.record_trajectory) result.trajectory.push_back(result.w);

  for (int k = 0; k < cfg.max_iterations; ++k) {
    const double step = cfg.step_decay == StepDecay::inv_sqrt
                            ? cfg.step_c0 / std::sqrt(k + 1.0)
                            : cfg.step_c0 / (k + 1.0);
    std::vector<Eigen::VectorXd> next = metropolis_combine(graph, weights, result.w);
    std::vector<double> steps(n, 0.0);
    parallel_for(n, cfg.num_threads, [&](std::size_t l) {
      const NodeData& d = data[l];
      const Eigen::VectorXd resid = d.response - d.design * next[l];
      Eigen::VectorXd slope(resid.size());
      for (Eigen::Index i = 0; i < resid.size(); ++i) slope(i) = check_slope(resid(i), cfg.tau);
      Eigen::VectorXd grad = -(d.design.transpose() * slope) / d.num_samples();
      for (Eigen::Index p = 0; p + 1 < grad.size(); ++p) {
        const double w = next[l](p);
        grad(p) += cfg.lambda * static_cast<double>((w > 0.0) - (w < 0.0));
      }
      next[l] -= step * grad;
      if (!next[l].allFinite()) throw DivergenceError(k, static_cast<int>(l), "non-finite baseline w");
      steps[l] = (next[l] - result.w[l]).norm();
    });
    result.w = std::move(next);

    IterationRecord rec;
    rec.k = k + 1;
    for (std::size_t l = 0; l < n; ++l) {
      rec.objective += local_objective(data[l], result.w[l], cfg.tau, cfg.lambda);
    }
    for (const Edge& e : graph.edges()) {
      rec.consensus_residual = std::max(
          rec.consensus_residual, (result.w[e.first] - result.w[e.second]).lpNorm<Eigen::Infinity>());
    }
    rec.w_step = *std::max_element(steps.begin(), steps.end());
    if (observer) observer(result.w, rec);
    result.records.push_back(rec);
    if (cfg.record_trajectory) result.trajectory.push_back(result.w);
  }
  return result;
}

}  // namespace dsad
