#include "dsad/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace dsad {

void check_node_data(const NodeData& data) {
  if (data.design.rows() < 1) throw std::invalid_argument("node data needs at least one sample");
  if (data.design.cols() < 1) throw std::invalid_argument("node data needs an intercept column");
  if (data.response.size() != data.design.rows()) {
    throw std::invalid_argument("response length does not match design rows");
  }
  if (!(data.design.col(data.design.cols() - 1).array() == 1.0).all()) {
    throw std::invalid_argument("last design column must be all ones");
  }
  if (!data.design.allFinite() || !data.response.allFinite()) {
    throw std::invalid_argument("node data contains non-finite values");
  }
}

NodeData with_intercept(const Eigen::MatrixXd& raw_design, Eigen::VectorXd response) {
  NodeData out;
  out.design.resize(raw_design.rows(), raw_design.cols() + 1);
  out.design.leftCols(raw_design.cols()) = raw_design;
  out.design.col(raw_design.cols()).setOnes();
  out.response = std::move(response);
  check_node_data(out);
  return out;
}

Eigen::MatrixXd gen_design(int num_samples, int num_features, double corr, std::uint64_t seed) {
  if (num_samples < 1 || num_features < 0) throw std::invalid_argument("bad design dimensions");
  if (!(corr >= 0.0 && corr < 1.0)) throw std::invalid_argument("corr must lie in [0,1)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - corr * corr);
  Eigen::MatrixXd x(num_samples, num_features);
  for (int i = 0; i < num_samples; ++i) {
    double prev = 0.0;
    for (int p = 0; p < num_features; ++p) {
      const double e = normal(rng);
      prev = p == 0 ? e : corr * prev + innovation * e;
      x(i, p) = prev;
    }
  }
  return x;
}

NodeData gen_node_data(const Eigen::MatrixXd& design, const GroundTruth& truth,
                       std::uint64_t seed) {
  if (design.cols() != truth.coefficients.size()) {
    throw std::invalid_argument("design columns do not match coefficient length");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y = design * truth.coefficients;
  if (truth.noise_std > 0.0) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += truth.noise_std * normal(rng);
  }
  return with_intercept(design, std::move(y));
}

GroundTruth sparse_truth(int num_features, int num_active, double value, double noise_std,
                         std::uint64_t seed) {
  if (num_features < 0 || num_active < 0 || num_active > num_features) {
    throw std::invalid_argument("need 0 <= num_active <= P");
  }
  std::vector<int> indices(num_features);
  std::iota(indices.begin(), indices.end(), 0);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < num_active; ++i) {
    std::uniform_int_distribution<int> pick(i, num_features - 1);
    std::swap(indices[i], indices[pick(rng)]);
  }
  GroundTruth truth;
  truth.coefficients = Eigen::VectorXd::Zero(num_features);
  truth.active_set.assign(indices.begin(), indices.begin() + num_active);
  std::sort(truth.active_set.begin(), truth.active_set.end());
  if (value == 0.0) truth.active_set.clear();
  for (int p : truth.active_set) truth.coefficients(p) = value;
  truth.noise_std = noise_std;
  return truth;
}

GroundTruth with_quantile_offset(GroundTruth truth, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("tau must lie in (0,1)");
  truth.tau_quantile_offset = truth.noise_std * normal_quantile(tau);
  return truth;
}

Eigen::VectorXd true_augmented_w(const GroundTruth& truth, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("tau must lie in (0,1)");
  Eigen::VectorXd w(truth.coefficients.size() + 1);
  w.head(truth.coefficients.size()) = truth.coefficients;
  w(truth.coefficients.size()) = truth.noise_std * normal_quantile(tau);
  return w;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal quantile needs u in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;

  double x = 0.0;
  if (u < low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - low) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = normal_cdf(x) - u;
  const double step = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - step / (1.0 + x * step / 2.0);
}

}  // namespace dsad
