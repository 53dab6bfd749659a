#include "dsad/solver_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace dsad {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void write_iteration_log(std::ostream& out, std::span<const IterationRecord> records,
                         std::span<const MetricReport> metrics) {
  if (!metrics.empty() && metrics.size() != records.size()) {
    throw std::invalid_argument("metrics must align with iteration records");
  }
  out << "k,objective,aug_lagrangian,primal_residual,consensus_residual,stationarity_residual,"
         "w_step";
  if (!metrics.empty()) out << ",mse,network_mse,recognition_accuracy";
  out << '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const IterationRecord& r = records[i];
    out << r.k << ',' << format_number(r.objective) << ','
        << (r.aug_lagrangian ? format_number(*r.aug_lagrangian) : "") << ','
        << format_number(r.primal_residual) << ',' << format_number(r.consensus_residual) << ','
        << (r.stationarity_residual ? format_number(*r.stationarity_residual) : "") << ','
        << format_number(r.w_step);
    if (!metrics.empty()) {
      out << ',' << format_number(metrics[i].mse) << ',' << format_number(metrics[i].network_mse)
          << ',' << format_number(metrics[i].recognition_accuracy);
    }
    out << '\n';
  }
}

namespace {

constexpr const char* kMagic = "dsad-checkpoint";

void write_vector(std::ostream& out, const char* name, const Eigen::VectorXd& v) {
  out << name << ' ' << v.size();
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v(i));
    out << ' ' << buf;
  }
  out << '\n';
}

void expect(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) {
    throw std::runtime_error("checkpoint: expected '" + token + "', got '" + got + "'");
  }
}

Eigen::VectorXd read_vector(std::istream& in, const char* name) {
  expect(in, name);
  Eigen::Index n = 0;
  if (!(in >> n) || n < 0) throw std::runtime_error(std::string("checkpoint: bad size for ") + name);
  Eigen::VectorXd v(n);
  std::string token;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> token)) throw std::runtime_error("checkpoint: truncated vector");
    // strtod keeps subnormals, stod would throw on them
    char* end = nullptr;
    v(i) = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      throw std::runtime_error("checkpoint: bad number '" + token + "'");
    }
  }
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const SolverState& state) {
  out << kMagic << " 1\n";
  out << "k " << state.k << '\n';
  out << "nodes " << state.w.size() << '\n';
  for (std::size_t l = 0; l < state.w.size(); ++l) {
    write_vector(out, "w", state.w[l]);
    write_vector(out, "z", state.z[l]);
    write_vector(out, "psi", state.psi[l]);
  }
  out << "edges " << state.edges.size() << '\n';
  for (const auto& e : state.edges) {
    write_vector(out, "g_first", e.g_first);
    write_vector(out, "g_second", e.g_second);
    write_vector(out, "xi_first", e.xi_first);
    write_vector(out, "xi_second", e.xi_second);
  }
}

SolverState read_checkpoint(std::istream& in) {
  expect(in, kMagic);
  int version = 0;
  if (!(in >> version) || version != 1) throw std::runtime_error("checkpoint: unsupported version");
  SolverState s;
  expect(in, "k");
  in >> s.k;
  expect(in, "nodes");
  std::size_t nodes = 0;
  in >> nodes;
  for (std::size_t l = 0; l < nodes; ++l) {
    s.w.push_back(read_vector(in, "w"));
    s.z.push_back(read_vector(in, "z"));
    s.psi.push_back(read_vector(in, "psi"));
  }
  expect(in, "edges");
  std::size_t edges = 0;
  in >> edges;
  for (std::size_t e = 0; e < edges; ++e) {
    EdgeVariables v;
    v.g_first = read_vector(in, "g_first");
    v.g_second = read_vector(in, "g_second");
    v.xi_first = read_vector(in, "xi_first");
    v.xi_second = read_vector(in, "xi_second");
    s.edges.push_back(std::move(v));
  }
  if (!in) throw std::runtime_error("checkpoint: read failure");
  return s;
}

void save_checkpoint(const std::filesystem::path& path, const SolverState& state) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_checkpoint(out, state);
}

SolverState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_checkpoint(in);
}

}  // namespace dsad
