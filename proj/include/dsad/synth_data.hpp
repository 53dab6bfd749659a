#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace dsad {

/// Local data at one agent. The last design column is the intercept (all
/// ones), so `design` is M_l x (P+1).
struct NodeData {
  Eigen::MatrixXd design;
  Eigen::VectorXd response;

  int num_samples() const { return static_cast<int>(design.rows()); }
  int num_features() const { return static_cast<int>(design.cols()) - 1; }
};

/// Throws std::invalid_argument when the intercept column, sizes or
/// finiteness are wrong.
void check_node_data(const NodeData& data);

/// Builds NodeData from a raw M x P design by appending the intercept column.
NodeData with_intercept(const Eigen::MatrixXd& raw_design, Eigen::VectorXd response);

struct GroundTruth {
  Eigen::VectorXd coefficients;  // length P
  std::vector<int> active_set;   // sorted indices of nonzero coefficients
  double noise_std = 0.0;
  double tau_quantile_offset = 0.0;  // noise quantile for the configured tau
};

/// Rows i.i.d. N(0, Sigma) with Sigma_pq = corr^|p-q|, via the AR(1)
/// recursion x_p = corr x_{p-1} + sqrt(1 - corr^2) e_p.
Eigen::MatrixXd gen_design(int num_samples, int num_features, double corr, std::uint64_t seed);

/// y = design * beta + N(0, noise_std^2); appends the intercept column.
NodeData gen_node_data(const Eigen::MatrixXd& design, const GroundTruth& truth,
                       std::uint64_t seed);

/// Uniform random support of size `num_active` set to `value`.
/// tau_quantile_offset is left at 0 (the median); see with_quantile_offset().
GroundTruth sparse_truth(int num_features, int num_active, double value, double noise_std,
                         std::uint64_t seed);

GroundTruth with_quantile_offset(GroundTruth truth, double tau);

/// [beta; noise_std * Phi^{-1}(tau)].
Eigen::VectorXd true_augmented_w(const GroundTruth& truth, double tau);

double normal_cdf(double x);
/// Acklam's rational approximation refined by one Halley step on Phi.
double normal_quantile(double u);

}  // namespace dsad
