#include "dsad/harness.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace dsad::harness {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigParseError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigParseError("key '" + key + "': expected an integer, got '" + value + "'");
  }
  return v;
}

std::optional<double> parse_auto(const std::string& key, const std::string& value) {
  if (value == "auto") return std::nullopt;
  return parse_double(key, value);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"nodes", [](auto& c, auto& k, auto& v) { c.num_nodes = static_cast<int>(parse_int(k, v)); }},
      {"side", [](auto& c, auto& k, auto& v) { c.side = parse_double(k, v); }},
      {"radius", [](auto& c, auto& k, auto& v) { c.radius = parse_double(k, v); }},
      {"degree_min", [](auto& c, auto& k, auto& v) { c.degree_min = static_cast<int>(parse_int(k, v)); }},
      {"degree_max", [](auto& c, auto& k, auto& v) { c.degree_max = static_cast<int>(parse_int(k, v)); }},
      {"samples_per_node",
       [](auto& c, auto& k, auto& v) { c.samples_per_node = static_cast<int>(parse_int(k, v)); }},
      {"features", [](auto& c, auto& k, auto& v) { c.num_features = static_cast<int>(parse_int(k, v)); }},
      {"corr", [](auto& c, auto& k, auto& v) { c.corr = parse_double(k, v); }},
      {"active", [](auto& c, auto& k, auto& v) { c.num_active = static_cast<int>(parse_int(k, v)); }},
      {"coef_value", [](auto& c, auto& k, auto& v) { c.coef_value = parse_double(k, v); }},
      {"noise_std", [](auto& c, auto& k, auto& v) { c.noise_std = parse_double(k, v); }},
      {"tau", [](auto& c, auto& k, auto& v) { c.tau = parse_double(k, v); }},
      {"lambda", [](auto& c, auto& k, auto& v) { c.lambda = parse_double(k, v); }},
      {"gamma_mcp", [](auto& c, auto& k, auto& v) { c.gamma_mcp = parse_double(k, v); }},
      {"gamma_scad", [](auto& c, auto& k, auto& v) { c.gamma_scad = parse_double(k, v); }},
      {"c", [](auto& c, auto& k, auto& v) { c.c = parse_auto(k, v); }},
      {"d", [](auto& c, auto& k, auto& v) { c.d = parse_auto(k, v); }},
      {"beta", [](auto& c, auto& k, auto& v) { c.beta = parse_double(k, v); }},
      {"omega", [](auto& c, auto& k, auto& v) { c.omega = parse_auto(k, v); }},
      {"max_iterations",
       [](auto& c, auto& k, auto& v) { c.max_iterations = static_cast<int>(parse_int(k, v)); }},
      {"consensus_tol", [](auto& c, auto& k, auto& v) { c.consensus_tol = parse_double(k, v); }},
      {"stationarity_tol", [](auto& c, auto& k, auto& v) { c.stationarity_tol = parse_double(k, v); }},
      {"baseline_step", [](auto& c, auto& k, auto& v) { c.baseline_step = parse_double(k, v); }},
      {"baseline_decay",
       [](auto& c, auto& k, auto& v) {
         try {
           c.baseline_decay = step_decay_from_string(v);
         } catch (const std::exception&) {
           throw ConfigParseError("key '" + k + "': expected inv_sqrt or inv_k, got '" + v + "'");
         }
       }},
      {"trials", [](auto& c, auto& k, auto& v) { c.trials = static_cast<int>(parse_int(k, v)); }},
      {"seed",
       [](auto& c, auto& k, auto& v) {
         const long long s = parse_int(k, v);
         if (s < 0) throw ConfigParseError("key 'seed': must be non-negative");
         c.base_seed = static_cast<std::uint64_t>(s);
       }},
      {"threads", [](auto& c, auto& k, auto& v) { c.threads = static_cast<int>(parse_int(k, v)); }},
      {"output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& required_keys() {
  static const std::vector<std::string> keys = {
      "nodes", "samples_per_node", "features", "tau", "lambda", "max_iterations", "trials", "seed"};
  return keys;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigParseError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigParseError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigParseError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigParseError(where + "missing value for key '" + key + "'");
    try {
      it->second(cfg, key, value);
    } catch (const ConfigParseError& e) {
      throw ConfigParseError(where + e.what());
    }
  }
  for (const auto& key : required_keys()) {
    if (!seen.count(key)) throw ConfigParseError(source + ": missing required key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

std::vector<std::string> check_config(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  need(cfg.tau > 0.0 && cfg.tau < 1.0, "tau must lie in (0,1)");
  need(cfg.num_nodes >= 1, "nodes must be >= 1");
  need(cfg.samples_per_node >= 1, "samples_per_node must be >= 1");
  need(cfg.num_features >= 0, "features must be >= 0");
  need(cfg.num_active >= 0 && cfg.num_active <= cfg.num_features, "need 0 <= active <= features");
  need(cfg.corr >= 0.0 && cfg.corr < 1.0, "corr must lie in [0,1)");
  need(cfg.noise_std >= 0.0, "noise_std must be >= 0");
  need(cfg.lambda >= 0.0, "lambda must be >= 0");
  need(cfg.gamma_mcp > 1.0, "gamma_mcp must exceed 1");
  need(cfg.gamma_scad > 2.0, "gamma_scad must exceed 2");
  need(cfg.beta > 0.0, "beta must be positive");
  need(!cfg.c || *cfg.c > 0.0, "c must be positive");
  need(!cfg.d || *cfg.d > 0.0, "d must be positive");
  need(cfg.max_iterations >= 0, "max_iterations must be >= 0");
  need(cfg.consensus_tol >= 0.0 && cfg.stationarity_tol >= 0.0, "tolerances must be >= 0");
  need(cfg.baseline_step >= 0.0, "baseline_step must be >= 0");
  need(cfg.trials >= 1, "trials must be >= 1");
  need(cfg.threads >= 1, "threads must be >= 1");
  if (cfg.num_nodes >= 2) {
    need(cfg.side > 0.0 && cfg.radius > 0.0, "side and radius must be positive");
    need(cfg.degree_min >= 1 && cfg.degree_min <= cfg.degree_max && cfg.degree_max < cfg.num_nodes,
         "degree bounds must satisfy 1 <= degree_min <= degree_max < nodes");
  }
  return problems;
}

}  // namespace dsad::harness
