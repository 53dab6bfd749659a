#pragma once

#include "dsad/metrics.hpp"
#include "dsad/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace dsad {

/// Iteration log: CSV with header
///   k,objective,aug_lagrangian,primal_residual,consensus_residual,
///   stationarity_residual,w_step[,mse,network_mse,recognition_accuracy]
/// Unset optional fields are written as empty cells. `metrics` is either
/// empty or aligned with `records`.
void write_iteration_log(std::ostream& out, std::span<const IterationRecord> records,
                         std::span<const MetricReport> metrics = {});

std::string format_number(double value);

/// Text checkpoint holding every state array with its dimensions. Values are
/// printed with 17 significant digits, which round-trips doubles exactly.
void write_checkpoint(std::ostream& out, const SolverState& state);
SolverState read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const SolverState& state);
SolverState load_checkpoint(const std::filesystem::path& path);

}  // namespace dsad
