#include "dsad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dsad {

double mse(std::span<const Eigen::VectorXd> estimates, const Eigen::VectorXd& truth) {
  if (estimates.empty()) throw std::invalid_argument("mse needs at least one estimate");
  double total = 0.0;
  for (const auto& w : estimates) {
    if (w.size() != truth.size()) throw std::invalid_argument("mse: dimension mismatch");
    total += (w - truth).squaredNorm();
  }
  return total / static_cast<double>(estimates.size());
}

Eigen::VectorXd consensus_mean(std::span<const Eigen::VectorXd> estimates) {
  if (estimates.empty()) throw std::invalid_argument("mean of zero estimates");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(estimates.front().size());
  for (const auto& w : estimates) {
    if (w.size() != mean.size()) throw std::invalid_argument("estimates differ in length");
    mean += w;
  }
  return mean / static_cast<double>(estimates.size());
}

double network_mse(std::span<const Eigen::VectorXd> estimates) {
  const Eigen::VectorXd mean = consensus_mean(estimates);
  double total = 0.0;
  for (const auto& w : estimates) total += (w - mean).squaredNorm();
  return total / static_cast<double>(estimates.size());
}

double recognition_accuracy(std::span<const Eigen::VectorXd> estimates,
                            std::span<const int> true_support, int num_features,
                            double activity_eps) {
  if (estimates.empty() || num_features <= 0) return 1.0;
  std::vector<char> active(num_features, 0);
  for (int p : true_support) {
    if (p < 0 || p >= num_features) throw std::invalid_argument("support index out of range");
    active[p] = 1;
  }
  long correct = 0;
  for (const auto& w : estimates) {
    if (w.size() < num_features) throw std::invalid_argument("estimate shorter than P");
    for (int p = 0; p < num_features; ++p) {
      const bool declared = std::abs(w(p)) > activity_eps;
      correct += declared == static_cast<bool>(active[p]);
    }
  }
  return static_cast<double>(correct) /
         (static_cast<double>(estimates.size()) * static_cast<double>(num_features));
}

double quantile_coverage_gap(std::span<const NodeData> data, const Eigen::VectorXd& w,
                             double tau) {
  long below = 0;
  long total = 0;
  for (const auto& d : data) {
    const Eigen::VectorXd fit = d.design * w;
    below += (d.response.array() <= fit.array()).count();
    total += d.num_samples();
  }
  if (total == 0) throw std::invalid_argument("coverage needs data");
  return std::abs(static_cast<double>(below) / static_cast<double>(total) - tau);
}

MetricReport evaluate(std::span<const Eigen::VectorXd> estimates, const GroundTruth& truth,
                      double tau, std::span<const NodeData> data, double activity_eps) {
  MetricReport r;
  r.mse = mse(estimates, true_augmented_w(truth, tau));
  r.network_mse = network_mse(estimates);
  r.recognition_accuracy = recognition_accuracy(
      estimates, truth.active_set, static_cast<int>(truth.coefficients.size()), activity_eps);
  r.quantile_coverage_gap = quantile_coverage_gap(data, consensus_mean(estimates), tau);
  return r;
}

}  // namespace dsad
