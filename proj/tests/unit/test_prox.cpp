#include "dsad/prox.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace dsad;
using doctest::Approx;

TEST_SUITE("prox") {

TEST_CASE("check loss values") {
  CHECK(check_loss(2.0, 0.5) == Approx(1.0));
  CHECK(check_loss(1.0, 0.75) == Approx(0.75));
  CHECK(check_loss(-1.0, 0.75) == Approx(0.25));
  CHECK_THROWS_AS(check_loss(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(check_loss(1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(check_loss(1.0, -0.2), std::domain_error);
}

TEST_CASE("check loss reflection identity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0), t(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng), tau = t(rng);
    CHECK(check_loss(x, tau) + check_loss(-x, tau) == Approx(std::abs(x)).epsilon(1e-12));
    CHECK(check_loss(x, tau) == Approx(check_loss(-x, 1.0 - tau)).epsilon(1e-12));
    CHECK(check_loss(x, tau) == Approx(oracle::pinball(x, tau)).epsilon(1e-12));
  }
}

TEST_CASE("penalty values") {
  const PenaltySpec mcp{PenaltyKind::mcp, 0.5, 2.4};
  const PenaltySpec scad{PenaltyKind::scad, 0.5, 3.7};
  CHECK(penalty_value(0.0, mcp) == 0.0);
  CHECK(penalty_value(0.0, scad) == 0.0);
  CHECK(penalty_value(5.0, mcp) == Approx(0.3));
  CHECK(penalty_value(0.3, scad) == Approx(0.15));
}

TEST_CASE("penalty values agree with integrated derivative") {
  // g(w) = integral_0^w g'(s) ds by the midpoint rule on the library derivative.
  for (const PenaltySpec spec : {PenaltySpec{PenaltyKind::mcp, 0.5, 2.4},
                                 PenaltySpec{PenaltyKind::scad, 0.5, 3.7},
                                 PenaltySpec{PenaltyKind::mcp, 0.055, 1.5},
                                 PenaltySpec{PenaltyKind::scad, 1.2, 2.2}}) {
    for (double w : {0.1, 0.4, 0.9, 1.7, 3.0, 6.0}) {
      const int n = 200000;
      double integral = 0.0;
      for (int i = 0; i < n; ++i) integral += penalty_derivative((i + 0.5) * w / n, spec) * w / n;
      CHECK(penalty_value(w, spec) == Approx(integral).epsilon(1e-7));
    }
  }
}

TEST_CASE("penalty shape: even, nondecreasing in |w|, flat beyond gamma*lambda") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam_d(0.01, 2.0), w_d(0.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double lam = lam_d(rng);
    for (const PenaltySpec spec : {PenaltySpec{PenaltyKind::mcp, lam, 1.1 + 3 * lam_d(rng)},
                                   PenaltySpec{PenaltyKind::scad, lam, 2.1 + 3 * lam_d(rng)}}) {
      const double a = w_d(rng), b = w_d(rng);
      CHECK(penalty_value(-a, spec) == penalty_value(a, spec));
      CHECK(penalty_value(std::min(a, b), spec) <= penalty_value(std::max(a, b), spec) + 1e-15);
      const double knee = spec.gamma * spec.lambda;
      CHECK(penalty_value(knee + a, spec) == Approx(penalty_value(knee, spec)).epsilon(1e-12));
      CHECK(penalty_value(a, spec) ==
            Approx(spec.kind == PenaltyKind::mcp ? oracle::mcp(a, lam, spec.gamma)
                                                 : oracle::scad(a, lam, spec.gamma))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("penalty spec validation") {
  CHECK_NOTHROW(PenaltySpec{PenaltyKind::mcp, 0.0, 1.01}.validate());
  CHECK_THROWS_AS((PenaltySpec{PenaltyKind::mcp, 0.1, 1.0}.validate()), std::domain_error);
  CHECK_THROWS_AS((PenaltySpec{PenaltyKind::scad, 0.1, 2.0}.validate()), std::domain_error);
  CHECK_THROWS_AS((PenaltySpec{PenaltyKind::scad, -0.1, 3.7}.validate()), std::domain_error);
  CHECK(penalty_kind_from_string("mcp") == PenaltyKind::mcp);
  CHECK(penalty_kind_from_string("SCAD") == PenaltyKind::scad);
  CHECK_THROWS(penalty_kind_from_string("lasso"));
}

TEST_CASE("weak convexity modulus") {
  CHECK(weak_convexity_modulus({PenaltyKind::mcp, 0.1, 2.4}) == Approx(1.0 / 2.4));
  CHECK(weak_convexity_modulus({PenaltyKind::scad, 0.1, 3.7}) == Approx(0.370370370370));
  const double eps = 1e-6;
  CHECK(weak_convexity_modulus({PenaltyKind::mcp, 0.1, 1.0 + eps}) == Approx(1.0 / (1.0 + eps)));
}

TEST_CASE("weak convexity modulus makes g + rho/2 w^2 convex") {
  // second differences of g(w) + rho w^2 / 2 are nonnegative on a grid
  for (const PenaltySpec spec :
       {PenaltySpec{PenaltyKind::mcp, 0.7, 2.4}, PenaltySpec{PenaltyKind::scad, 0.7, 3.7}}) {
    const double rho = weak_convexity_modulus(spec);
    auto f = [&](double w) { return penalty_value(w, spec) + 0.5 * rho * w * w; };
    const double h = 1e-3;
    for (double w = -4.0; w <= 4.0; w += 0.0173) {
      CHECK(f(w - h) - 2 * f(w) + f(w + h) >= -1e-12);
    }
  }
}

TEST_CASE("prox of penalty: documented examples") {
  const PenaltySpec mcp{PenaltyKind::mcp, 0.5, 2.4};
  CHECK(prox_penalty(0.0, 1.0, mcp) == 0.0);
  CHECK(prox_penalty(0.0, 1.0, {PenaltyKind::scad, 0.5, 3.7}) == 0.0);
  CHECK(prox_penalty(3.0, 0.5, mcp) == 3.0);
  auto obj = [&](double x) { return oracle::mcp(x, 0.5, 2.4) + (x - 0.6) * (x - 0.6) / (2 * 0.5); };
  const double ref = oracle::grid_argmin(obj, -1.6, 1.6, 1e-5);
  CHECK(std::abs(prox_penalty(0.6, 0.5, mcp) - ref) <= 1e-4);
  CHECK_THROWS_AS(prox_penalty(1.0, 0.0, mcp), std::domain_error);
  CHECK_THROWS_AS(prox_penalty(1.0, -1.0, mcp), std::domain_error);
}

TEST_CASE("prox of penalty against grid oracle, including degenerate steps") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> a_d(-3.0, 3.0), t_d(0.05, 4.0), lam_d(0.05, 1.0),
      mcp_g(1.1, 4.0), scad_g(2.1, 5.0);
  int degenerate = 0;
  for (int i = 0; i < 150; ++i) {
    const double a = a_d(rng), t = t_d(rng), lam = lam_d(rng);
    for (const PenaltySpec spec : {PenaltySpec{PenaltyKind::mcp, lam, mcp_g(rng)},
                                   PenaltySpec{PenaltyKind::scad, lam, scad_g(rng)}}) {
      auto obj = [&](double x) {
        const double g = spec.kind == PenaltyKind::mcp ? oracle::mcp(x, lam, spec.gamma)
                                                       : oracle::scad(x, lam, spec.gamma);
        return g + (x - a) * (x - a) / (2.0 * t);
      };
      const double r = std::abs(a) + 1.0;
      const double ref = oracle::grid_argmin_small(obj, -r, r, 1e-5);
      const double got = prox_penalty(a, t, spec);
      const double limit = spec.kind == PenaltyKind::mcp ? spec.gamma : spec.gamma - 1.0;
      if (t >= limit) ++degenerate;
      INFO("a=" << a << " t=" << t << " lam=" << lam << " gamma=" << spec.gamma);
      CHECK(std::abs(got - ref) <= 2e-5);
    }
  }
  CHECK(degenerate > 10);
}

TEST_CASE("prox of penalty: structural properties") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> a_d(-5.0, 5.0), t_d(0.01, 5.0), lam_d(0.0, 1.5);
  for (int i = 0; i < 2000; ++i) {
    const double a = a_d(rng), t = t_d(rng), lam = lam_d(rng);
    for (const PenaltySpec spec :
         {PenaltySpec{PenaltyKind::mcp, lam, 2.4}, PenaltySpec{PenaltyKind::scad, lam, 3.7}}) {
      const double x = prox_penalty(a, t, spec);
      CHECK(prox_penalty(-a, t, spec) == -x);
      CHECK(std::abs(x) <= std::abs(a));
      // the identity and dead zones only hold while the subproblem is strongly convex
      const double limit = spec.kind == PenaltyKind::mcp ? spec.gamma : spec.gamma - 1.0;
      if (t < limit && std::abs(a) >= spec.gamma * lam) CHECK(x == a);
      if (t < limit && std::abs(a) <= t * lam) CHECK(x == 0.0);
    }
  }
}

TEST_CASE("prox with a degenerate step can leave the dead zone and the identity region") {
  const PenaltySpec mcp{PenaltyKind::mcp, 1.0, 2.4};
  // t = 10: staying at a beats 0 even though |a| <= t*lambda
  CHECK(prox_penalty(10.0, 10.0, mcp) == 10.0);
  // |a| >= gamma*lambda but the quadratic is so weak that 0 wins
  CHECK(prox_penalty(2.5, 100.0, mcp) == 0.0);
}

TEST_CASE("prox with lambda zero is the identity") {
  for (double a : {-2.0, -0.1, 0.0, 0.3, 7.0}) {
    CHECK(prox_penalty(a, 0.7, {PenaltyKind::mcp, 0.0, 2.4}) == a);
    CHECK(prox_penalty(a, 10.0, {PenaltyKind::scad, 0.0, 3.7}) == a);
  }
}

TEST_CASE("smoothed absolute value") {
  CHECK(smooth_abs(2.0, 1.0) == 2.0);
  CHECK(smooth_abs(0.0, 1.0) == 0.5);
  CHECK(smooth_abs(0.3, 0.3) == Approx(0.3));
  CHECK_THROWS_AS(smooth_abs(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(smooth_abs_grad(1.0, -1.0), std::domain_error);
  CHECK(smooth_abs_grad(5.0, 1.0) == 1.0);
  CHECK(smooth_abs_grad(0.0, 1.0) == 0.0);
  CHECK(smooth_abs_grad(0.5, 1.0) == 0.5);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> z_d(-3.0, 3.0), mu_d(0.01, 2.0);
  int checked = 0;
  while (checked < 1000) {
    const double z = z_d(rng), mu = mu_d(rng), h = 1e-6;
    if (std::abs(std::abs(z) - mu) <= 2 * h) continue;
    ++checked;
    const double fd = (smooth_abs(z + h, mu) - smooth_abs(z - h, mu)) / (2 * h);
    CHECK(std::abs(smooth_abs_grad(z, mu) - fd) <= 1e-6);
    const double gap = smooth_abs(z, mu) - std::abs(z);
    CHECK(gap >= 0.0);
    CHECK(gap <= mu / 2 + 1e-15);
    CHECK(std::abs(smooth_abs_grad(z, mu)) <= 1.0);
  }
}

TEST_CASE("smoothed absolute value converges as mu shrinks") {
  for (double z : {-1.0, -0.01, 0.0, 1e-4, 0.5}) {
    double prev = smooth_abs(z, 1.0) - std::abs(z);
    for (double mu = 0.5; mu > 1e-8; mu /= 2) {
      const double gap = smooth_abs(z, mu) - std::abs(z);
      CHECK(gap <= prev + 1e-15);
      prev = gap;
    }
    CHECK(prev <= 1e-8);
  }
}

TEST_CASE("prox of smoothed absolute value") {
  CHECK(prox_smooth_abs(0.0, 1.0, 0.5) == 0.0);
  CHECK(prox_smooth_abs(1.5, 1.0, 0.5) == Approx(0.5));
  CHECK(prox_smooth_abs(1.0, 0.4, 0.2) == Approx(0.6));
  // quadratic branch: z/mu + (z - x)/t = 0
  CHECK(prox_smooth_abs(0.3, 0.4, 1.0) == Approx(0.3 / 1.4));
  CHECK_THROWS_AS(prox_smooth_abs(1.0, 0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(prox_smooth_abs(1.0, 0.5, 0.0), std::domain_error);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> x_d(-4.0, 4.0), r_d(0.01, 2.0), mu_d(0.01, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double x = x_d(rng), rho = r_d(rng), mu = mu_d(rng);
    auto obj = [&](double z) { return oracle::huber_abs(z, mu) + (z - x) * (z - x) / (2 * rho); };
    const double r = std::abs(x) + 1.0;
    const double ref = oracle::grid_argmin(obj, -r, r, 1e-5);
    CHECK(std::abs(prox_smooth_abs(x, rho, mu) - ref) <= 1e-4);
    CHECK(prox_smooth_abs(-x, rho, mu) == -prox_smooth_abs(x, rho, mu));
    const double y = x_d(rng);
    CHECK(std::abs(prox_smooth_abs(x, rho, mu) - prox_smooth_abs(y, rho, mu)) <=
          std::abs(x - y) + 1e-15);
  }
}

TEST_CASE("prox of smoothed absolute value is continuous at branch edges") {
  for (double rho : {0.1, 1.0, 3.0}) {
    for (double mu : {0.05, 0.5, 2.0}) {
      const double edge = rho + mu;
      CHECK(prox_smooth_abs(edge, rho, mu) == Approx(mu));
      CHECK(prox_smooth_abs(std::nextafter(edge, 0.0), rho, mu) == Approx(mu));
      CHECK(prox_smooth_abs(-edge, rho, mu) == Approx(-mu));
    }
  }
}

TEST_CASE("schedule") {
  auto s = schedule_at(0, {1.0, 2.0, 1.0});
  CHECK(s.sigma_psi == 1.0);
  CHECK(s.sigma_xi == 2.0);
  CHECK(s.mu == 1.0);
  s = schedule_at(3, {1.0, 1.0, 1.0});
  CHECK(s.sigma_psi == 2.0);
  CHECK(s.sigma_xi == 2.0);
  CHECK(s.mu == 0.5);
  s = schedule_at(99, {std::sqrt(1.5), 1.0, 1.0});
  CHECK(s.sigma_psi == Approx(std::sqrt(150.0)));
  CHECK(s.sigma_xi == Approx(10.0));
  CHECK(s.mu == Approx(0.1));
}

}  // TEST_SUITE
