#include "dsad/synth_data.hpp"

#include <doctest.h>

#include <cmath>

using namespace dsad;
using doctest::Approx;

namespace {

// Phi from the complementary error function, independent of normal_cdf().
double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_SUITE("synth_data") {

TEST_CASE("design: shape, determinism and unit marginal") {
  auto a = gen_design(4, 1, 0.5, 9);
  CHECK(a.rows() == 4);
  CHECK(a.cols() == 1);
  CHECK(gen_design(50, 6, 0.5, 123) == gen_design(50, 6, 0.5, 123));
  CHECK(gen_design(50, 6, 0.5, 123) != gen_design(50, 6, 0.5, 124));
  CHECK_THROWS(gen_design(10, 3, 1.0, 1));
  CHECK_THROWS(gen_design(0, 3, 0.5, 1));
}

TEST_CASE("design: Monte-Carlo covariance matches corr^|p-q|") {
  const int m = 100000;
  auto x = gen_design(m, 6, 0.5, 2024);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (m - 1);
  Eigen::MatrixXd sigma(6, 6);
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) sigma(p, q) = std::pow(0.5, std::abs(p - q));
  CHECK((cov - sigma).norm() < 0.05);
  CHECK(std::abs(cov(0, 2) - 0.25) < 0.01);
  for (int p = 0; p < 6; ++p) CHECK(std::abs(cov(p, p) - 1.0) < 0.01);
}

TEST_CASE("node data: intercept and noiseless response") {
  GroundTruth t;
  t.coefficients = Eigen::Vector2d(1.0, 0.0);
  t.noise_std = 0.0;
  Eigen::MatrixXd x(1, 2);
  x << 2.0, 5.0;
  auto d = gen_node_data(x, t, 1);
  CHECK(d.response(0) == 2.0);
  CHECK(d.design.cols() == 3);
  CHECK(d.design(0, 2) == 1.0);
  CHECK(d.num_features() == 2);
  CHECK(d.num_samples() == 1);

  t.coefficients.setZero();
  auto z = gen_node_data(gen_design(20, 2, 0.3, 5), t, 2);
  CHECK(z.response.isZero());

  Eigen::MatrixXd wrong(3, 4);
  wrong.setZero();
  CHECK_THROWS(gen_node_data(wrong, t, 1));
}

TEST_CASE("node data: noise standard deviation") {
  GroundTruth t;
  t.coefficients = Eigen::VectorXd::Zero(1);
  t.noise_std = 0.2;
  auto d = gen_node_data(gen_design(100000, 1, 0.0, 8), t, 77);
  const double mean = d.response.mean();
  const double sd = std::sqrt((d.response.array() - mean).square().sum() / (d.response.size() - 1));
  CHECK(std::abs(sd - 0.2) < 0.005);
}

TEST_CASE("node data checks") {
  NodeData d;
  d.design = Eigen::MatrixXd::Ones(3, 2);
  d.response = Eigen::VectorXd::Zero(3);
  CHECK_NOTHROW(check_node_data(d));
  d.design(1, 1) = 0.5;
  CHECK_THROWS(check_node_data(d));
  d.design(1, 1) = 1.0;
  d.response = Eigen::VectorXd::Zero(2);
  CHECK_THROWS(check_node_data(d));
  d.response = Eigen::VectorXd::Zero(3);
  d.design(0, 0) = std::nan("");
  CHECK_THROWS(check_node_data(d));
}

TEST_CASE("sparse truth") {
  auto t = sparse_truth(18, 3, 1.0, 0.2, 4);
  CHECK(t.coefficients.size() == 18);
  CHECK((t.coefficients.array() == 1.0).count() == 3);
  CHECK((t.coefficients.array() == 0.0).count() == 15);
  CHECK(t.active_set.size() == 3);
  for (int p = 0; p < 18; ++p) {
    const bool listed = std::find(t.active_set.begin(), t.active_set.end(), p) != t.active_set.end();
    CHECK(listed == (t.coefficients(p) != 0.0));
  }
  CHECK(std::is_sorted(t.active_set.begin(), t.active_set.end()));
  CHECK(sparse_truth(5, 0, 1.0, 0.2, 1).coefficients.isZero());
  CHECK((sparse_truth(5, 5, 2.0, 0.2, 1).coefficients.array() == 2.0).all());
  CHECK(sparse_truth(18, 3, 1.0, 0.2, 4).active_set == t.active_set);
  CHECK_THROWS(sparse_truth(5, 6, 1.0, 0.2, 1));

  // every index is reachable
  std::vector<int> hits(18, 0);
  for (std::uint64_t s = 0; s < 400; ++s)
    for (int p : sparse_truth(18, 3, 1.0, 0.2, s).active_set) ++hits[p];
  for (int h : hits) CHECK(h > 20);
}

TEST_CASE("true augmented coefficient vector") {
  GroundTruth t = sparse_truth(4, 2, 1.0, 0.2, 1);
  CHECK(true_augmented_w(t, 0.5)(4) == Approx(0.0).epsilon(1e-15));
  CHECK(true_augmented_w(t, 0.75)(4) == Approx(0.134898).epsilon(1e-5));
  CHECK(true_augmented_w(t, 0.975)(4) == Approx(0.391993).epsilon(1e-5));
  CHECK(true_augmented_w(t, 0.75).head(4) == t.coefficients);
  CHECK_THROWS(true_augmented_w(t, 1.0));
  CHECK(with_quantile_offset(t, 0.75).tau_quantile_offset == Approx(0.134898).epsilon(1e-5));
}

TEST_CASE("normal quantile inverts the CDF") {
  for (double u = 0.001; u < 0.999; u += 0.0007) {
    CHECK(std::abs(phi(normal_quantile(u)) - u) <= 1e-9);
    CHECK(std::abs(normal_cdf(normal_quantile(u)) - u) <= 1e-9);
  }
  CHECK(normal_quantile(0.75) == Approx(0.6744897501960817).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(1e-10) == Approx(-6.361340902404056).epsilon(1e-9));
  CHECK_THROWS(normal_quantile(0.0));
  CHECK_THROWS(normal_quantile(1.0));
}

}  // TEST_SUITE
