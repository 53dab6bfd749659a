#include "dsad/metrics.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace dsad;
using doctest::Approx;

TEST_SUITE("metrics") {

TEST_CASE("mse") {
  Eigen::VectorXd truth = Eigen::Vector3d(1.0, 0.0, 2.0);
  std::vector<Eigen::VectorXd> same(3, truth);
  CHECK(mse(same, truth) == 0.0);
  std::vector<Eigen::VectorXd> two{truth + Eigen::Vector3d(1, 0, 0), truth + Eigen::Vector3d(0, 3, 0)};
  CHECK(mse(two, truth) == Approx(5.0));
  std::vector<Eigen::VectorXd> one{truth + Eigen::Vector3d(0.5, 0.5, 0)};
  CHECK(mse(one, truth) == Approx(0.5));
  std::vector<Eigen::VectorXd> bad{Eigen::Vector2d(0, 0)};
  CHECK_THROWS(mse(bad, truth));
}

TEST_CASE("network mse") {
  std::vector<Eigen::VectorXd> same(4, Eigen::Vector2d(3.0, -1.0));
  CHECK(network_mse(same) == 0.0);
  std::vector<Eigen::VectorXd> pair{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 2.0)};
  CHECK(network_mse(pair) == Approx(1.0));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  std::vector<Eigen::VectorXd> est(5, Eigen::VectorXd(6));
  for (auto& w : est)
    for (int i = 0; i < 6; ++i) w(i) = n01(rng);
  Eigen::VectorXd shift(6);
  for (int i = 0; i < 6; ++i) shift(i) = n01(rng);
  auto moved = est;
  for (auto& w : moved) w += shift;
  CHECK(network_mse(moved) == Approx(network_mse(est)).epsilon(1e-12));
}

TEST_CASE("bias-variance decomposition") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::VectorXd> est(7, Eigen::VectorXd(5));
    for (auto& w : est)
      for (int i = 0; i < 5; ++i) w(i) = n01(rng);
    Eigen::VectorXd truth(5);
    for (int i = 0; i < 5; ++i) truth(i) = n01(rng);
    const double bias = (consensus_mean(est) - truth).squaredNorm();
    CHECK(std::abs(mse(est, truth) - (network_mse(est) + bias)) <= 1e-10);
  }
}

TEST_CASE("recognition accuracy") {
  const std::vector<int> support{1, 4, 9};
  Eigen::VectorXd exact = Eigen::VectorXd::Zero(19);
  for (int p : support) exact(p) = 1.0;
  exact(18) = 0.7;  // intercept is ignored
  std::vector<Eigen::VectorXd> perfect(3, exact);
  CHECK(recognition_accuracy(perfect, support, 18) == 1.0);

  std::vector<Eigen::VectorXd> zeros(2, Eigen::VectorXd::Zero(19));
  CHECK(recognition_accuracy(zeros, support, 18) == Approx(15.0 / 18.0));

  std::vector<Eigen::VectorXd> dense(2, Eigen::VectorXd::Constant(19, 1e-9));
  CHECK(recognition_accuracy(dense, support, 18) == Approx(3.0 / 18.0));
  CHECK(recognition_accuracy(dense, support, 18, std::numeric_limits<double>::infinity()) ==
        Approx(15.0 / 18.0));
  CHECK(recognition_accuracy(dense, support, 18, 1e-6) == Approx(15.0 / 18.0));

  std::vector<Eigen::VectorXd> mixed{exact, Eigen::VectorXd::Zero(19)};
  CHECK(recognition_accuracy(mixed, support, 18) == Approx((18.0 + 15.0) / 36.0));
  const std::vector<int> bad{18};
  CHECK_THROWS(recognition_accuracy(perfect, bad, 18));
}

TEST_CASE("quantile coverage gap") {
  GroundTruth t = sparse_truth(4, 2, 1.0, 0.2, 3);
  std::vector<NodeData> data;
  for (int l = 0; l < 30; ++l) data.push_back(gen_node_data(gen_design(500, 4, 0.5, 100 + l), t, 900 + l));
  CHECK(quantile_coverage_gap(data, true_augmented_w(t, 0.75), 0.75) <= 0.02);
  CHECK(quantile_coverage_gap(data, true_augmented_w(t, 0.5), 0.5) <= 0.02);
  Eigen::VectorXd high = true_augmented_w(t, 0.75);
  high(4) = 1e6;
  CHECK(quantile_coverage_gap(data, high, 0.75) == Approx(0.25));
  high(4) = -1e6;
  CHECK(quantile_coverage_gap(data, high, 0.75) == Approx(0.75));
}

TEST_CASE("evaluate bundles the metrics") {
  GroundTruth t = with_quantile_offset(sparse_truth(4, 1, 1.0, 0.2, 5), 0.75);
  std::vector<NodeData> data{gen_node_data(gen_design(200, 4, 0.5, 1), t, 2)};
  std::vector<Eigen::VectorXd> est{true_augmented_w(t, 0.75)};
  auto r = evaluate(est, t, 0.75, data);
  CHECK(r.mse == 0.0);
  CHECK(r.network_mse == 0.0);
  CHECK(r.recognition_accuracy == 1.0);
  CHECK(r.quantile_coverage_gap < 0.1);
}

}  // TEST_SUITE
