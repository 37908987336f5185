#include "chds/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "chds/output.hpp"

namespace chds {

const std::vector<std::string>& run_csv_header() {
  static const std::vector<std::string> header{
      "step",     "time",    "E_total",     "E_kinetic",    "E_double_well", "E_gradient", "E_longrange",
      "dissipation", "mass_dev", "div_res", "mu_mean_res", "picard_iters", "newton_iters"};
  return header;
}

namespace {

std::filesystem::path snapshot_path(const std::filesystem::path& dir, int step) {
  std::ostringstream name;
  name << "state_" << std::setw(6) << std::setfill('0') << step << ".vtk";
  return dir / name.str();
}

}  // namespace

RunSummary run(const Discretization& disc, const Params& params, const State& initial, const RunOptions& options) {
  params.validate();
  const int steps = params.step_count();
  const auto start = std::chrono::steady_clock::now();

  std::ofstream csv;
  if (options.csv) {
    csv = open_output(*options.csv);
    const auto& header = run_csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) csv << (i ? "," : "") << header[i];
    csv << '\n';
  }
  const bool snapshots = options.snapshot_dir && options.snapshot_every > 0;
  if (snapshots) write_state_vtk(initial, snapshot_path(*options.snapshot_dir, initial.step));

  Stepper stepper(disc, params);
  StabilityMonitor monitor(disc);
  RunSummary summary;
  summary.initial_energy = energy(disc, initial, params);
  summary.max_energy_increase = -std::numeric_limits<double>::infinity();
  double e_prev = summary.initial_energy.total;

  State current = initial;
  for (int m = 1; m <= steps; ++m) {
    StepRecord rec;
    State next = stepper.step(current, &rec.stats);
    rec.step = next.step;
    rec.time = next.time;
    if (options.diagnostics) {
      rec.energy = energy(disc, next, params);
      rec.dissipation = dissipation(disc, next, params);
      rec.energy_law = energy_law_residual(disc, current, next, params);
      rec.invariants = invariant_residuals(disc, next, params);
      monitor.observe(current, next, params.tau);
      summary.max_energy_increase = std::max(summary.max_energy_increase, rec.energy.total - e_prev);
      e_prev = rec.energy.total;
      summary.max_energy_law = std::max(summary.max_energy_law, std::abs(rec.energy_law));
      summary.max_mass_dev = std::max(summary.max_mass_dev, rec.invariants.mass_dev);
      summary.max_div_res = std::max(summary.max_div_res, rec.invariants.div_res);
      summary.max_mu_mean_res = std::max(summary.max_mu_mean_res, rec.invariants.mu_mean_res);
    }
    summary.max_picard_iters = std::max(summary.max_picard_iters, rec.stats.picard_iters);
    summary.max_newton_iters = std::max(summary.max_newton_iters, rec.stats.newton_iters);
    summary.monolithic_steps += rec.stats.monolithic ? 1 : 0;

    if (csv.is_open()) {
      const double row[] = {static_cast<double>(rec.step),     rec.time,
                            rec.energy.total,                  rec.energy.kinetic,
                            rec.energy.double_well,            rec.energy.gradient,
                            rec.energy.longrange,              rec.dissipation,
                            rec.invariants.mass_dev,           rec.invariants.div_res,
                            rec.invariants.mu_mean_res,        static_cast<double>(rec.stats.picard_iters),
                            static_cast<double>(rec.stats.newton_iters)};
      for (std::size_t i = 0; i < std::size(row); ++i) csv << (i ? "," : "") << format_number(row[i]);
      csv << '\n';
      csv.flush();
    }
    if (options.observer) options.observer(rec, next);
    if (snapshots && (m % options.snapshot_every == 0 || m == steps))
      write_state_vtk(next, snapshot_path(*options.snapshot_dir, next.step));
    current = std::move(next);
  }

  summary.steps = steps;
  summary.final_energy = energy(disc, current, params);
  summary.sum_grad_mu = monitor.sum_grad_mu();
  summary.sum_grad_u = monitor.sum_grad_u();
  summary.sum_phi_increment = monitor.sum_phi_increment();
  summary.max_mu_l2 = monitor.max_mu_l2();
  summary.max_laplacian_phi = monitor.max_laplacian_phi();
  summary.final_state = std::move(current);
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

}  // namespace chds
