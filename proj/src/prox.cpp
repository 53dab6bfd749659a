#include "dsad/prox.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace dsad {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

double soft_threshold(double a, double amount) {
  return sign(a) * std::max(std::abs(a) - amount, 0.0);
}

double prox_objective(double x, double a, double t, const PenaltySpec& spec) {
  const double diff = x - a;
  return penalty_value(x, spec) + diff * diff / (2.0 * t);
}

// Global minimiser over the candidate set, used when the prox subproblem is
// not strongly convex. Candidates are the stationary point of each convex
// piece (clamped into its piece), the breakpoints, and a itself.
double prox_by_enumeration(double a, double t, const PenaltySpec& spec) {
  const double s = a >= 0.0 ? 1.0 : -1.0;
  const double mag = std::abs(a);
  const double lam = spec.lambda;
  const double knee = spec.gamma * lam;
  std::array<double, 6> candidates{
      0.0,
      soft_threshold(a, t * lam),
      s * std::min(std::max(mag - t * lam, 0.0), lam),
      s * lam,
      s * knee,
      a,
  };
  double best = 0.0;
  double best_value = prox_objective(0.0, a, t, spec);
  for (double x : candidates) {
    const double value = prox_objective(x, a, t, spec);
    if (value < best_value ||
        (value == best_value && std::abs(x) < std::abs(best))) {
      best = x;
      best_value = value;
    }
  }
  return best;
}

}  // namespace

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("penalty lambda must be finite and >= 0");
  }
  if (kind == PenaltyKind::mcp && !(gamma > 1.0)) {
    throw std::domain_error("MCP requires gamma > 1");
  }
  if (kind == PenaltyKind::scad && !(gamma > 2.0)) {
    throw std::domain_error("SCAD requires gamma > 2");
  }
  if (!std::isfinite(gamma)) throw std::domain_error("penalty gamma must be finite");
}

const char* to_string(PenaltyKind kind) {
  return kind == PenaltyKind::mcp ? "mcp" : "scad";
}

PenaltyKind penalty_kind_from_string(const char* name) {
  if (std::strcmp(name, "mcp") == 0 || std::strcmp(name, "MCP") == 0) return PenaltyKind::mcp;
  if (std::strcmp(name, "scad") == 0 || std::strcmp(name, "SCAD") == 0) return PenaltyKind::scad;
  throw std::invalid_argument(std::string("unknown penalty kind: ") + name);
}

double check_loss(double u, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("tau must lie in (0,1)");
  return 0.5 * (std::abs(u) + (2.0 * tau - 1.0) * u);
}

double penalty_value(double w, const PenaltySpec& spec) {
  const double x = std::abs(w);
  const double lam = spec.lambda;
  const double g = spec.gamma;
  if (spec.kind == PenaltyKind::mcp) {
    if (x <= g * lam) return lam * x - x * x / (2.0 * g);
    return g * lam * lam / 2.0;
  }
  if (x <= lam) return lam * x;
  if (x <= g * lam) return (2.0 * g * lam * x - x * x - lam * lam) / (2.0 * (g - 1.0));
  return lam * lam * (g + 1.0) / 2.0;
}

double penalty_derivative(double w, const PenaltySpec& spec) {
  if (w == 0.0) return 0.0;
  const double x = std::abs(w);
  const double lam = spec.lambda;
  const double g = spec.gamma;
  double slope = 0.0;
  if (spec.kind == PenaltyKind::mcp) {
    slope = x <= g * lam ? lam - x / g : 0.0;
  } else if (x <= lam) {
    slope = lam;
  } else if (x <= g * lam) {
    slope = (g * lam - x) / (g - 1.0);
  }
  return sign(w) * slope;
}

double weak_convexity_modulus(const PenaltySpec& spec) {
  return spec.kind == PenaltyKind::mcp ? 1.0 / spec.gamma : 1.0 / (spec.gamma - 1.0);
}

double prox_penalty(double a, double t, const PenaltySpec& spec) {
  if (!(t > 0.0)) throw std::domain_error("prox step must be positive");
  const double lam = spec.lambda;
  const double g = spec.gamma;
  const double mag = std::abs(a);
  const double s = sign(a);

  if (spec.kind == PenaltyKind::mcp) {
    if (t >= g) return prox_by_enumeration(a, t, spec);
    if (mag <= t * lam) return 0.0;
    if (mag <= g * lam) return s * (mag - t * lam) / (1.0 - t / g);
    return a;
  }
  if (t >= g - 1.0) return prox_by_enumeration(a, t, spec);
  if (mag <= lam + t * lam) return soft_threshold(a, t * lam);
  if (mag <= g * lam) return s * ((g - 1.0) * mag - t * g * lam) / (g - 1.0 - t);
  return a;
}

double smooth_abs(double z, double mu) {
  if (!(mu > 0.0)) throw std::domain_error("smoothing parameter mu must be positive");
  const double x = std::abs(z);
  if (x >= mu) return x;
  return z * z / (2.0 * mu) + mu / 2.0;
}

double smooth_abs_grad(double z, double mu) {
  if (!(mu > 0.0)) throw std::domain_error("smoothing parameter mu must be positive");
  if (std::abs(z) >= mu) return sign(z);
  return z / mu;
}

double prox_smooth_abs(double x, double thresh, double mu) {
  if (!(thresh > 0.0)) throw std::domain_error("prox shrinkage must be positive");
  if (!(mu > 0.0)) throw std::domain_error("smoothing parameter mu must be positive");
  const double edge = thresh + mu;
  if (x >= edge) return x - thresh;
  if (x <= -edge) return x + thresh;
  return x / (1.0 + thresh / mu);
}

ScheduleValues schedule_at(std::int64_t k, const Schedule& schedule) {
  const double root = std::sqrt(static_cast<double>(k) + 1.0);
  return {schedule.c * root, schedule.d * root, schedule.beta / root};
}

}  // namespace dsad
