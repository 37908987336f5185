#pragma once

#include <filesystem>
#include <functional>
#include <optional>

#include "chds/diagnostics.hpp"
#include "chds/scheme.hpp"

namespace chds {

/// Everything recorded for one completed step.
struct StepRecord {
  int step = 0;
  double time = 0.0;
  EnergyBreakdown energy;
  double dissipation = 0.0;
  double energy_law = 0.0;  // residual of the per-step energy identity
  InvariantResiduals invariants;
  StepStats stats;
};

struct RunOptions {
  std::optional<std::filesystem::path> csv;  // per-step diagnostics
  std::optional<std::filesystem::path> snapshot_dir;
  int snapshot_every = 0;  // 0: no snapshots; otherwise every N steps plus the initial and final state
  bool diagnostics = true;  // energy and invariants per step; off only for bare timing runs
  std::function<void(const StepRecord&, const State&)> observer;
};

struct RunSummary {
  State final_state;
  int steps = 0;
  EnergyBreakdown initial_energy, final_energy;
  double max_energy_increase = 0.0;  // max_m (E^m - E^{m-1}), negative if strictly decreasing
  double max_energy_law = 0.0;
  double max_mass_dev = 0.0, max_div_res = 0.0, max_mu_mean_res = 0.0;
  int max_picard_iters = 0, max_newton_iters = 0, monolithic_steps = 0;
  double sum_grad_mu = 0.0, sum_grad_u = 0.0, sum_phi_increment = 0.0;
  double max_mu_l2 = 0.0, max_laplacian_phi = 0.0;
  double wall_seconds = 0.0;
};

/// Header of the per-step CSV.
const std::vector<std::string>& run_csv_header();

/// Runs round(T / tau) steps from `initial`. On a failing step the CSV written so far is kept
/// and the error is rethrown.
RunSummary run(const Discretization& disc, const Params& params, const State& initial, const RunOptions& options = {});

}  // namespace chds
