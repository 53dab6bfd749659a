#include "dsad/solver.hpp"

#include "dsad/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dsad {

namespace {

// Relative slack for the schedule inequalities, so that parameters written
// with finite decimal precision (c = sqrt(3/2) etc.) still pass at equality.
constexpr double kInequalitySlack = 1e-12;

int max_samples_of(std::span<const NodeData> data) {
  int m = 0;
  for (const auto& d : data) m = std::max(m, d.num_samples());
  return m;
}

double distance_to_interval(double v, double lo, double hi) {
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0.0;
}

void require_finite(const Eigen::VectorXd& v, std::int64_t k, int node, const char* what) {
  if (!v.allFinite()) {
    throw DivergenceError(k, node, std::string("non-finite ") + what);
  }
}

}  // namespace

bool operator==(const SolverState& a, const SolverState& b) {
  if (a.k != b.k || a.w.size() != b.w.size() || a.edges.size() != b.edges.size()) return false;
  auto same = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.size() == y.size() && (x.array() == y.array()).all();
  };
  for (std::size_t l = 0; l < a.w.size(); ++l) {
    if (!same(a.w[l], b.w[l]) || !same(a.z[l], b.z[l]) || !same(a.psi[l], b.psi[l])) return false;
  }
  for (std::size_t e = 0; e < a.edges.size(); ++e) {
    const auto& x = a.edges[e];
    const auto& y = b.edges[e];
    if (!same(x.g_first, y.g_first) || !same(x.g_second, y.g_second) ||
        !same(x.xi_first, y.xi_first) || !same(x.xi_second, y.xi_second)) {
      return false;
    }
  }
  return true;
}

double omega_lower_bound(std::span<const NodeData> data, double tau, double lambda,
                         int max_samples) {
  if (data.empty()) throw std::invalid_argument("omega needs at least one node");
  double max_col_sum = 0.0;
  for (const auto& d : data) {
    max_col_sum = std::max(max_col_sum, d.design.cwiseAbs().colwise().sum().maxCoeff());
  }
  return std::max(tau, 1.0 - tau) * max_col_sum + max_samples * lambda;
}

double compute_omega(std::span<const NodeData> data, double tau, double lambda, int max_samples) {
  return omega_lower_bound(data, tau, lambda, max_samples) + 1.0;
}

std::string ConfigReport::summary() const {
  std::ostringstream out;
  out << (ok ? "valid" : "invalid") << "\n";
  out << "omega = " << omega << " (must exceed " << omega_lower_bound << ")\n";
  out << "max samples per node M = " << max_samples
      << (equal_sample_sizes ? "" : " (unequal node sizes; M = max_l M_l used)") << "\n";
  out << "weak convexity rho = " << weak_convexity << "\n";
  out << "min column norm^2 = " << min_column_norm_sq << "\n";
  if (warmup_iteration >= 0) out << "warm-up iteration K = " << warmup_iteration << "\n";
  for (const auto& v : violations) out << "violation: " << v << "\n";
  return out.str();
}

ConfigReport validate_config(const SolverConfig& cfg, std::span<const NodeData> data,
                             const Graph& graph) {
  ConfigReport report;
  auto fail = [&](std::string what) {
    report.ok = false;
    report.violations.push_back(std::move(what));
  };

  const bool tau_ok = cfg.tau > 0.0 && cfg.tau < 1.0;
  if (!tau_ok) fail("tau must lie in (0,1)");
  try {
    cfg.penalty.validate();
  } catch (const std::exception& e) {
    fail(e.what());
  }
  const Schedule& s = cfg.schedule;
  if (!(s.c > 0.0) || !(s.d > 0.0) || !(s.beta > 0.0)) fail("schedule c, d, beta must be positive");
  if (cfg.max_iterations < 0) fail("max_iterations must be >= 0");
  if (cfg.consensus_tol < 0.0 || cfg.stationarity_tol < 0.0) fail("tolerances must be >= 0");

  if (data.empty()) {
    fail("no node data");
    return report;
  }
  if (graph.num_nodes() != static_cast<int>(data.size())) {
    fail("graph has " + std::to_string(graph.num_nodes()) + " nodes but data has " +
         std::to_string(data.size()));
  }
  if (const GraphReport g = validate(graph); !g.ok) fail("graph: " + g.violation);

  const auto cols = data.front().design.cols();
  for (const auto& d : data) {
    try {
      check_node_data(d);
    } catch (const std::exception& e) {
      fail(std::string("node data: ") + e.what());
      return report;
    }
    if (d.design.cols() != cols) {
      fail("node designs have different column counts");
      return report;
    }
  }

  report.max_samples = max_samples_of(data);
  report.equal_sample_sizes = std::all_of(data.begin(), data.end(), [&](const NodeData& d) {
    return d.num_samples() == report.max_samples;
  });
  const double tau = tau_ok ? cfg.tau : 0.5;
  report.omega_lower_bound =
      omega_lower_bound(data, tau, cfg.penalty.lambda, report.max_samples);
  report.omega = cfg.omega.value_or(report.omega_lower_bound + 1.0);

  if (!(report.omega > report.omega_lower_bound)) {
    std::ostringstream msg;
    msg << "omega > max{tau,1-tau} max_l ||X_l^T||_inf + M lambda violated (omega = "
        << report.omega << ", bound = " << report.omega_lower_bound << ")";
    fail(msg.str());
  }
  if (!(s.beta * s.c >= std::sqrt(1.5) * (1.0 - kInequalitySlack))) {
    std::ostringstream msg;
    msg << "beta*c >= sqrt(3/2) violated (beta*c = " << s.beta * s.c << ")";
    fail(msg.str());
  }
  const double d_bound = std::sqrt(20.0) * report.omega;
  if (!(s.beta * s.d >= d_bound * (1.0 - kInequalitySlack))) {
    std::ostringstream msg;
    msg << "beta*d >= sqrt(20)*omega violated (beta*d = " << s.beta * s.d
        << ", sqrt(20)*omega = " << d_bound << ")";
    fail(msg.str());
  }

  double min_norm = std::numeric_limits<double>::infinity();
  for (const auto& d : data) {
    min_norm = std::min(min_norm, d.design.colwise().squaredNorm().minCoeff());
  }
  report.min_column_norm_sq = min_norm;
  if (!(min_norm > 0.0)) {
    fail("degenerate data: a design column is identically zero");
    return report;
  }
  try {
    report.weak_convexity = weak_convexity_modulus(cfg.penalty);
  } catch (...) {
  }
  if (s.d > 0.0 && report.weak_convexity > 0.0) {
    const double threshold = report.max_samples * report.weak_convexity / min_norm;
    const double ratio = threshold / s.d;
    std::int64_t k = std::max<std::int64_t>(0, static_cast<std::int64_t>(ratio * ratio) - 2);
    while (!(schedule_at(k, s).sigma_xi > threshold)) ++k;
    report.warmup_iteration = k;
  }
  return report;
}

ConfigError::ConfigError(ConfigReport report)
    : std::runtime_error("invalid solver configuration:\n" + report.summary()),
      report_(std::move(report)) {}

DivergenceError::DivergenceError(std::int64_t k, int node, const std::string& what)
    : std::runtime_error("divergence at iteration " + std::to_string(k) +
                         (node >= 0 ? " node " + std::to_string(node + 1) : " in edge block") +
                         ": " + what),
      k_(k),
      node_(node) {}

const char* to_string(Termination reason) {
  return reason == Termination::budget ? "budget" : "tolerance";
}

DsadSolver::DsadSolver(SolverConfig cfg, Graph graph, std::vector<NodeData> data)
    : cfg_(std::move(cfg)), graph_(std::move(graph)), data_(std::move(data)) {
  if (data_.empty()) throw std::invalid_argument("solver needs at least one node");
  if (graph_.num_nodes() != static_cast<int>(data_.size())) {
    throw std::invalid_argument("graph node count does not match data");
  }
  num_coef_ = static_cast<int>(data_.front().design.cols());
  for (const auto& d : data_) {
    check_node_data(d);
    if (d.design.cols() != num_coef_) throw std::invalid_argument("inconsistent design widths");
  }
  omega_ = cfg_.omega.value_or(
      compute_omega(data_, cfg_.tau, cfg_.penalty.lambda, max_samples_of(data_)));
  for (const auto& d : data_) column_norm_sq_.push_back(d.design.colwise().squaredNorm());
  incidence_.resize(data_.size());
  for (std::size_t e = 0; e < graph_.num_edges(); ++e) {
    incidence_[graph_.edges()[e].first].push_back({e, true});
    incidence_[graph_.edges()[e].second].push_back({e, false});
  }
}

ConfigReport DsadSolver::validate() const {
  SolverConfig resolved = cfg_;
  resolved.omega = omega_;
  return validate_config(resolved, data_, graph_);
}

SolverState DsadSolver::init_state() const {
  SolverState s;
  for (const auto& d : data_) {
    s.w.push_back(Eigen::VectorXd::Zero(num_coef_));
    s.z.push_back(Eigen::VectorXd::Zero(d.num_samples()));
    s.psi.push_back(Eigen::VectorXd::Zero(d.num_samples()));
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(num_coef_);
  s.edges.assign(graph_.num_edges(), EdgeVariables{zero, zero, zero, zero});
  return s;
}

ScheduleValues DsadSolver::next_schedule(const SolverState& state) const {
  return schedule_at(state.k, cfg_.schedule);
}

const Eigen::VectorXd& DsadSolver::own_g(const SolverState& s, const Incidence& inc) const {
  return inc.is_first ? s.edges[inc.edge].g_first : s.edges[inc.edge].g_second;
}

const Eigen::VectorXd& DsadSolver::own_xi(const SolverState& s, const Incidence& inc) const {
  return inc.is_first ? s.edges[inc.edge].xi_first : s.edges[inc.edge].xi_second;
}

double DsadSolver::node_penalty(const Eigen::VectorXd& w) const {
  double total = 0.0;
  for (int p = 0; p + 1 < num_coef_; ++p) total += penalty_value(w(p), cfg_.penalty);
  return total;
}

Eigen::VectorXd DsadSolver::update_w_node(int node, const SolverState& state,
                                          const ScheduleValues& sched) const {
  const NodeData& d = data_[node];
  const auto& X = d.design;
  const double sigma = sched.sigma_psi;
  const int degree = static_cast<int>(incidence_[node].size());
  const double m = d.num_samples();

  Eigen::VectorXd w = state.w[node];
  Eigen::VectorXd fit = X * w;
  // Coordinate p minimises M_l g(w_p) + (Upsilon/2) w_p^2 - a_p w_p with
  //   a_p = X_p'(sigma (y - z) - Psi) - sigma X_p' X_{-p} w_{-p}
  //         + sum_own (sigma_xi g_p - xi_p).
  const Eigen::VectorXd data_pull = sigma * (d.response - state.z[node]) - state.psi[node];
  Eigen::VectorXd edge_pull = Eigen::VectorXd::Zero(num_coef_);
  for (const auto& inc : incidence_[node]) {
    edge_pull += sched.sigma_xi * own_g(state, inc) - own_xi(state, inc);
  }

  for (int p = 0; p < num_coef_; ++p) {
    const double norm_sq = column_norm_sq_[node](p);
    const double upsilon = sigma * norm_sq + sched.sigma_xi * degree;
    if (!(upsilon > 0.0) || !std::isfinite(upsilon)) {
      throw DivergenceError(state.k, node, "bad curvature in coordinate " + std::to_string(p));
    }
    const double old = w(p);
    const double a = X.col(p).dot(data_pull - sigma * fit) + sigma * norm_sq * old + edge_pull(p);
    const double updated = p + 1 < num_coef_
                               ? prox_penalty(a / upsilon, m / upsilon, cfg_.penalty)
                               : a / upsilon;
    if (!std::isfinite(updated)) {
      throw DivergenceError(state.k, node, "non-finite w coordinate " + std::to_string(p));
    }
    if (updated != old) fit += (updated - old) * X.col(p);
    w(p) = updated;
  }
  return w;
}

Eigen::VectorXd DsadSolver::update_z_node(int node, const Eigen::VectorXd& w_new,
                                          const SolverState& state,
                                          const ScheduleValues& sched) const {
  const NodeData& d = data_[node];
  const double sigma = sched.sigma_psi;
  const Eigen::VectorXd alpha =
      (d.response - d.design * w_new) -
      (state.psi[node].array() + (cfg_.tau - 0.5)).matrix() / sigma;
  const double shrink = 1.0 / (2.0 * sigma);
  Eigen::VectorXd z(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    z(i) = prox_smooth_abs(alpha(i), shrink, sched.mu);
  }
  require_finite(z, state.k, node, "z");
  return z;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> DsadSolver::update_edge(
    std::size_t edge, const SolverState& state, const ScheduleValues& sched) const {
  const Edge& ends = graph_.edges()[edge];
  const EdgeVariables& v = state.edges[edge];
  const double sigma = sched.sigma_xi;
  const Eigen::VectorXd r = state.w[ends.first] + v.xi_first / sigma;
  const Eigen::VectorXd s = state.w[ends.second] + v.xi_second / sigma;
  const Eigen::VectorXd mid = 0.5 * (r + s);
  const double shrink = 2.0 * omega_ / sigma;
  Eigen::VectorXd half_gap(num_coef_);
  for (int p = 0; p < num_coef_; ++p) {
    half_gap(p) = 0.5 * prox_smooth_abs(r(p) - s(p), shrink, sched.mu);
  }
  std::pair<Eigen::VectorXd, Eigen::VectorXd> g{mid + half_gap, mid - half_gap};
  require_finite(g.first, state.k, -1, "edge variable");
  require_finite(g.second, state.k, -1, "edge variable");
  return g;
}

void DsadSolver::update_duals(SolverState& state, const ScheduleValues& sched) const {
  for (std::size_t l = 0; l < data_.size(); ++l) {
    const NodeData& d = data_[l];
    state.psi[l] += sched.sigma_psi * (state.z[l] + d.design * state.w[l] - d.response);
  }
  for (std::size_t e = 0; e < graph_.num_edges(); ++e) {
    const Edge& ends = graph_.edges()[e];
    EdgeVariables& v = state.edges[e];
    v.xi_first += sched.sigma_xi * (state.w[ends.first] - v.g_first);
    v.xi_second += sched.sigma_xi * (state.w[ends.second] - v.g_second);
  }
}

IterationRecord DsadSolver::iterate(SolverState& state) const {
  const ScheduleValues sched = next_schedule(state);
  const std::size_t num_nodes = data_.size();
  std::vector<double> steps(num_nodes, 0.0);

  parallel_for(num_nodes, cfg_.num_threads, [&](std::size_t l) {
    const int node = static_cast<int>(l);
    Eigen::VectorXd w = update_w_node(node, state, sched);
    Eigen::VectorXd z = update_z_node(node, w, state, sched);
    const NodeData& d = data_[l];
    Eigen::VectorXd psi = state.psi[l] + sched.sigma_psi * (z + d.design * w - d.response);
    require_finite(psi, state.k, node, "Psi");
    steps[l] = (w - state.w[l]).norm();
    state.w[l] = std::move(w);
    state.z[l] = std::move(z);
    state.psi[l] = std::move(psi);
  });

  parallel_for(graph_.num_edges(), cfg_.num_threads, [&](std::size_t e) {
    auto [g_first, g_second] = update_edge(e, state, sched);
    const Edge& ends = graph_.edges()[e];
    EdgeVariables& v = state.edges[e];
    v.g_first = std::move(g_first);
    v.g_second = std::move(g_second);
    v.xi_first += sched.sigma_xi * (state.w[ends.first] - v.g_first);
    v.xi_second += sched.sigma_xi * (state.w[ends.second] - v.g_second);
    require_finite(v.xi_first, state.k, -1, "xi");
    require_finite(v.xi_second, state.k, -1, "xi");
  });

  ++state.k;
  const KktResiduals kkt = kkt_residuals(state);
  IterationRecord rec;
  rec.k = state.k;
  rec.objective = objective(state);
  rec.aug_lagrangian = augmented_lagrangian(state, sched);
  rec.primal_residual = kkt.primal;
  rec.consensus_residual = kkt.consensus;
  rec.stationarity_residual = kkt.stationarity;
  rec.w_step = *std::max_element(steps.begin(), steps.end());
  if (!std::isfinite(rec.objective) || !std::isfinite(*rec.aug_lagrangian) ||
      !std::isfinite(kkt.stationarity)) {
    throw DivergenceError(state.k, -1, "non-finite diagnostics");
  }
  return rec;
}

RunResult DsadSolver::run(const IterationObserver& observer) const {
  if (cfg_.enforce_conditions) {
    ConfigReport report = validate();
    if (!report.ok) throw ConfigError(std::move(report));
  }
  RunResult result;
  result.state = init_state();
  const bool early_exit = cfg_.consensus_tol > 0.0 || cfg_.stationarity_tol > 0.0;
  for (int it = 0; it < cfg_.max_iterations; ++it) {
    IterationRecord rec;
    try {
      rec = iterate(result.state);
    } catch (DivergenceError& e) {
      if (!result.records.empty()) e.set_last_finite_record(result.records.back());
      throw;
    }
    if (observer) observer(result.state, rec);
    result.records.push_back(rec);
    if (early_exit && rec.consensus_residual <= cfg_.consensus_tol &&
        *rec.stationarity_residual <= cfg_.stationarity_tol &&
        rec.primal_residual <= cfg_.stationarity_tol) {
      result.reason = Termination::tolerance;
      break;
    }
  }
  return result;
}

KktResiduals DsadSolver::kkt_residuals(const SolverState& state) const {
  KktResiduals out;
  const double kink = schedule_at(std::max<std::int64_t>(state.k - 1, 0), cfg_.schedule).mu;
  const double tau = cfg_.tau;
  const double lam = cfg_.penalty.lambda;

  for (std::size_t l = 0; l < data_.size(); ++l) {
    const NodeData& d = data_[l];
    const Eigen::VectorXd& w = state.w[l];
    out.primal = std::max(out.primal, (state.z[l] + d.design * w - d.response).norm());

    // 0 in M_l dP(w) + X'Psi + sum_own xi
    Eigen::VectorXd grad = d.design.transpose() * state.psi[l];
    for (const auto& inc : incidence_[l]) grad += own_xi(state, inc);
    const double m = d.num_samples();
    for (int p = 0; p < num_coef_; ++p) {
      double dist = 0.0;
      if (p + 1 == num_coef_) {
        dist = std::abs(grad(p));
      } else if (w(p) == 0.0) {
        dist = std::max(std::abs(grad(p)) - m * lam, 0.0);
      } else {
        dist = std::abs(grad(p) + m * penalty_derivative(w(p), cfg_.penalty));
      }
      out.stationarity = std::max(out.stationarity, dist);
    }

    // -Psi in d rho_tau(z)
    for (Eigen::Index i = 0; i < state.z[l].size(); ++i) {
      const double z = state.z[l](i);
      const double v = -state.psi[l](i);
      double dist = 0.0;
      if (z > kink) {
        dist = std::abs(v - tau);
      } else if (z < -kink) {
        dist = std::abs(v - (tau - 1.0));
      } else {
        dist = distance_to_interval(v, tau - 1.0, tau);
      }
      out.stationarity = std::max(out.stationarity, dist);
    }
  }
  for (const Edge& e : graph_.edges()) {
    out.consensus =
        std::max(out.consensus, (state.w[e.first] - state.w[e.second]).lpNorm<Eigen::Infinity>());
  }
  return out;
}

double DsadSolver::augmented_lagrangian(const SolverState& state,
                                        const ScheduleValues& sched) const {
  double total = 0.0;
  const double mu = sched.mu;
  for (std::size_t l = 0; l < data_.size(); ++l) {
    const NodeData& d = data_[l];
    const Eigen::VectorXd& z = state.z[l];
    double smooth = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) smooth += smooth_abs(z(i), mu);
    const Eigen::VectorXd resid = z + d.design * state.w[l] - d.response;
    total += 0.5 * smooth + (cfg_.tau - 0.5) * z.sum() + d.num_samples() * node_penalty(state.w[l]) +
             state.psi[l].dot(resid) + 0.5 * sched.sigma_psi * resid.squaredNorm();
  }
  for (std::size_t e = 0; e < graph_.num_edges(); ++e) {
    const Edge& ends = graph_.edges()[e];
    const EdgeVariables& v = state.edges[e];
    double tv = 0.0;
    for (int p = 0; p < num_coef_; ++p) tv += smooth_abs(v.g_first(p) - v.g_second(p), mu);
    const Eigen::VectorXd gap_first = state.w[ends.first] - v.g_first;
    const Eigen::VectorXd gap_second = state.w[ends.second] - v.g_second;
    total += omega_ * tv + 0.5 * sched.sigma_xi * (gap_first.squaredNorm() + gap_second.squaredNorm()) +
             v.xi_first.dot(gap_first) + v.xi_second.dot(gap_second);
  }
  return total;
}

double DsadSolver::objective(const SolverState& state) const {
  double total = 0.0;
  for (std::size_t l = 0; l < data_.size(); ++l) {
    const Eigen::VectorXd& z = state.z[l];
    for (Eigen::Index i = 0; i < z.size(); ++i) total += check_loss(z(i), cfg_.tau);
    total += data_[l].num_samples() * node_penalty(state.w[l]);
  }
  for (const auto& v : state.edges) total += omega_ * (v.g_first - v.g_second).lpNorm<1>();
  return total;
}

double centralized_objective(const Eigen::VectorXd& w, std::span<const NodeData> data, double tau,
                             const PenaltySpec& penalty) {
  double loss = 0.0;
  double n = 0.0;
  for (const auto& d : data) {
    const Eigen::VectorXd resid = d.response - d.design * w;
    for (Eigen::Index i = 0; i < resid.size(); ++i) loss += check_loss(resid(i), tau);
    n += d.num_samples();
  }
  double pen = 0.0;
  for (Eigen::Index p = 0; p + 1 < w.size(); ++p) pen += penalty_value(w(p), penalty);
  return loss + n * pen;
}

}  // namespace dsad
