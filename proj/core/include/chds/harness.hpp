#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "chds/config.hpp"
#include "chds/scheme.hpp"

namespace chds {

/// rate_i = log(norm_{i-1} / norm_i) / log(h_{i-1} / h_i); one entry fewer than the inputs.
std::vector<double> compute_rates(const std::vector<double>& norms, const std::vector<double>& hs);

struct LevelResult {
  int n = 0;  // equivalent cells per side
  double h = 0.0;
  double tau = 0.0;
  int steps = 0;
  int monolithic_steps = 0;
  double wall_seconds = 0.0;
};

/// H1 norms of fine - prolongated coarse final fields.
struct CauchyDifference {
  double h_coarse = 0.0, h_fine = 0.0;
  double phi = 0.0, mu = 0.0, p = 0.0, u = 0.0;
};

/// The coarse state's mesh must be an ancestor of the fine state's mesh.
CauchyDifference cauchy_difference(const State& coarse, const State& fine);

struct ConvergenceReport {
  Config config;  // echo; tau is per level
  std::vector<LevelResult> levels;
  std::vector<CauchyDifference> pairs;
  std::vector<double> rate_phi, rate_mu, rate_p, rate_u;  // between consecutive pairs
};

struct ConvergenceOptions {
  int threads = 1;  // levels run concurrently up to this many at once
  std::function<void(const std::string&)> log;
};

/// Runs the nested levels n0, 2 n0, ... (each obtained by uniform refinement) to time T with
/// tau = path_constant * h, then forms the Cauchy differences of consecutive levels.
ConvergenceReport cauchy_convergence(const Config& config, const ConvergenceOptions& options = {});

/// Columns: level, n_coarse, n_fine, h_coarse, h_fine, then norm and rate per field
/// (the rate of the first pair is left empty as 0 and flagged in the JSON summary).
void write_report_csv(const ConvergenceReport& report, const std::filesystem::path& path);
void write_report_json(const ConvergenceReport& report, const std::filesystem::path& path);

/// Reads a report CSV back; returns the rates recomputed from its norms, per field name
/// ("phi", "mu", "p", "u").
std::vector<double> rates_from_csv(const std::filesystem::path& path, const std::string& field);

}  // namespace chds
