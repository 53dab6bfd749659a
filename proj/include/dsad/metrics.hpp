#pragma once

#include "dsad/synth_data.hpp"

#include <Eigen/Dense>

#include <span>

namespace dsad {

struct MetricReport {
  double mse = 0.0;
  double network_mse = 0.0;
  double recognition_accuracy = 0.0;
  double quantile_coverage_gap = 0.0;
};

/// sum_l ||w_l - truth||^2 / L
double mse(std::span<const Eigen::VectorXd> estimates, const Eigen::VectorXd& truth);

/// sum_l ||w_l - mean||^2 / L
double network_mse(std::span<const Eigen::VectorXd> estimates);

Eigen::VectorXd consensus_mean(std::span<const Eigen::VectorXd> estimates);

/// Fraction of (node, coefficient) pairs over the first `num_features`
/// entries whose active/inactive classification (|w| > activity_eps) matches
/// the true support. The intercept is excluded.
double recognition_accuracy(std::span<const Eigen::VectorXd> estimates,
                            std::span<const int> true_support, int num_features,
                            double activity_eps = 0.0);

/// | #{i : y_i <= x_i'w} / n - tau |, pooled over all nodes.
double quantile_coverage_gap(std::span<const NodeData> data, const Eigen::VectorXd& w,
                             double tau);

MetricReport evaluate(std::span<const Eigen::VectorXd> estimates, const GroundTruth& truth,
                      double tau, std::span<const NodeData> data, double activity_eps = 0.0);

}  // namespace dsad
