#include "dsad/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace dsad;
using namespace dsad::harness;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (overrides output_dir)");
  cmd->add_option("--trials", o.trials, "number of trials")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized smoothing ADMM for sparse quantile regression"};
  app.require_subcommand(1);

  Overrides gen_o, run_o, cmp_o, val_o;
  std::string algorithm = "dsad_mcp";
  std::string data_dir;

  auto* gen = app.add_subcommand("generate", "write graphs and node data for each trial");
  add_common(gen, gen_o);
  auto* run = app.add_subcommand("run", "run one algorithm over all trials");
  add_common(run, run_o);
  run->add_option("--algorithm", algorithm, "dsad_mcp, dsad_scad or baseline")
      ->check(CLI::IsMember({"dsad_mcp", "dsad_scad", "baseline"}));
  run->add_option("--data", data_dir, "read trials written by 'generate' instead of regenerating");
  auto* cmp = app.add_subcommand("compare", "run all algorithms on identical trials");
  add_common(cmp, cmp_o);
  auto* val = app.add_subcommand("validate", "check the convergence conditions");
  add_common(val, val_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      std::cout << cmd_generate(resolve(gen_o));
    } else if (run->parsed()) {
      std::optional<std::filesystem::path> data;
      if (!data_dir.empty()) data = data_dir;
      std::cout << cmd_run(resolve(run_o), algorithm_from_string(algorithm), data);
    } else if (cmp->parsed()) {
      std::cout << cmd_compare(resolve(cmp_o));
    } else if (val->parsed()) {
      bool ok = true;
      std::cout << cmd_validate(resolve(val_o), ok);
      return ok ? 0 : 1;
    }
  } catch (const ConfigParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
