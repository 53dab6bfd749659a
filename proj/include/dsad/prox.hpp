#pragma once

#include <cstdint>

namespace dsad {

enum class PenaltyKind { mcp, scad };

/// Non-convex sparsity penalty g_{lambda,gamma}. MCP needs gamma > 1, SCAD
/// needs gamma > 2.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::mcp;
  double lambda = 0.0;
  double gamma = 3.0;

  /// Throws std::domain_error when lambda < 0 or gamma is out of range.
  void validate() const;
};

const char* to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(const char* name);

/// Penalty parameter and smoothing schedule:
///   sigma_psi = c*sqrt(k+1), sigma_xi = d*sqrt(k+1), mu = beta/sqrt(k+1).
struct Schedule {
  double c = 1.0;
  double d = 1.0;
  double beta = 1.0;
};

struct ScheduleValues {
  double sigma_psi;
  double sigma_xi;
  double mu;
};

// Check (pinball) loss 0.5*(|u| + (2*tau - 1)*u).
double check_loss(double u, double tau);

double penalty_value(double w, const PenaltySpec& spec);

/// Derivative of the penalty for w != 0 (both penalties are smooth away from
/// the origin). Returns 0 at w == 0.
double penalty_derivative(double w, const PenaltySpec& spec);

/// Weak convexity modulus: 1/gamma for MCP, 1/(gamma-1) for SCAD.
double weak_convexity_modulus(const PenaltySpec& spec);

/// argmin_x g(x) + (x - a)^2 / (2t).
///
/// Closed forms are used while the subproblem is strongly convex (t < gamma
/// for MCP, t < gamma - 1 for SCAD). Otherwise the objective is evaluated on
/// the finite set of piecewise stationary points and breakpoints and the
/// global minimiser is returned, ties going to the smaller magnitude.
double prox_penalty(double a, double t, const PenaltySpec& spec);

/// Smoothed absolute value: |z| for |z| >= mu, z^2/(2 mu) + mu/2 inside.
double smooth_abs(double z, double mu);
double smooth_abs_grad(double z, double mu);

/// argmin_z smooth_abs(z, mu) + (z - x)^2 / (2 thresh). `thresh` is the
/// shrinkage amount applied in the linear branches.
double prox_smooth_abs(double x, double thresh, double mu);

ScheduleValues schedule_at(std::int64_t k, const Schedule& schedule);

}  // namespace dsad
