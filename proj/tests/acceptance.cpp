// Acceptance suite: one PASS/FAIL line per criterion. Arguments select criteria (default: all).
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "chds/assembly.hpp"
#include "chds/diagnostics.hpp"
#include "chds/harness.hpp"
#include "chds/operators.hpp"
#include "chds/scheme.hpp"
#include "chds/simulation.hpp"
#include "support.hpp"

using namespace chds;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

InitialData spinodal(const Rectangle& d = {}) { return InitialData{spinodal_initial_phi(d), std::nullopt, InitMode::Interpolate}; }

// Runs `steps` steps and hands every (prev, next, stats) to `check`.
void march(const Discretization& disc, const Params& params, int steps,
           const std::function<void(const State&, const State&, const StepStats&)>& check) {
  State s = initialize(disc, spinodal(disc.mesh().domain()), params);
  Stepper stepper(disc, params);
  for (int m = 0; m < steps; ++m) {
    StepStats stats;
    State next = stepper.step(s, &stats);
    check(s, next, stats);
    s = std::move(next);
  }
}

Outcome table_reproduction() {
  Config config;
  config.n = 8;
  config.levels = 4;
  config.params.final_time = 0.4;
  ConvergenceOptions options;
  options.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  options.log = [](const std::string& s) { std::cout << "    " << s << std::endl; };
  const ConvergenceReport r = cauchy_convergence(config, options);
  for (std::size_t i = 0; i < r.pairs.size(); ++i)
    std::cout << "    h " << fmt(r.pairs[i].h_coarse) << " -> " << fmt(r.pairs[i].h_fine) << "  dphi " << fmt(r.pairs[i].phi)
              << "  dmu " << fmt(r.pairs[i].mu) << "  dp " << fmt(r.pairs[i].p) << '\n';
  const auto within = [](double v, double tol) { return std::abs(v - 1.0) <= tol; };
  Outcome o;
  o.pass = within(r.rate_phi[0], 0.15) && within(r.rate_phi[1], 0.15) && within(r.rate_mu[0], 0.15) &&
           within(r.rate_mu[1], 0.15) && within(r.rate_p[1], 0.2);
  o.detail = "rates phi " + fmt(r.rate_phi[0]) + ", " + fmt(r.rate_phi[1]) + "; mu " + fmt(r.rate_mu[0]) + ", " +
             fmt(r.rate_mu[1]) + "; p " + fmt(r.rate_p[1]);
  return o;
}

constexpr double kStabilityTaus[] = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
constexpr int kStabilitySteps = 20;

Outcome energy_stability() {
  Outcome o;
  double worst = -1e300;
  const Discretization disc(build_crossed_mesh({}, 8));
  for (double tau : kStabilityTaus) {
    Params params;
    params.tau = tau;
    params.final_time = kStabilitySteps * tau;
    const State s0 = initialize(disc, spinodal(), params);
    const double slack = 1e-10 * energy(disc, s0, params).total;
    march(disc, params, kStabilitySteps, [&](const State& prev, const State& next, const StepStats&) {
      const double inc = energy(disc, next, params).total - energy(disc, prev, params).total;
      worst = std::max(worst, inc);
      if (inc > slack) o.pass = false;
    });
  }
  o.detail = "largest per-step energy change " + fmt(worst) + " over tau in {1e-4 .. 1}, " +
             std::to_string(kStabilitySteps) + " steps each";
  return o;
}

Outcome energy_law() {
  Outcome o;
  const Discretization disc(build_crossed_mesh({}, 16));
  Params params;
  params.final_time = 50 * params.tau;
  params.newton_tol = params.picard_tol = params.linear_tol = 1e-12;
  const double scale = std::max(1.0, energy(disc, initialize(disc, spinodal(), params), params).total);
  double worst = 0.0;
  march(disc, params, 50, [&](const State& prev, const State& next, const StepStats&) {
    worst = std::max(worst, std::abs(energy_law_residual(disc, prev, next, params)));
  });
  o.pass = worst <= 1e-8 * scale;
  o.detail = "max |residual| " + fmt(worst) + " (limit " + fmt(1e-8 * scale) + ")";
  return o;
}

Outcome solvability() {
  Outcome o;
  double worst = 0.0;
  int max_outer = 0;
  const Discretization disc(build_crossed_mesh({}, 8));
  for (double tau : kStabilityTaus) {
    Params params;
    params.tau = tau;
    params.final_time = kStabilitySteps * tau;
    try {
      march(disc, params, kStabilitySteps, [&](const State&, const State&, const StepStats& st) {
        worst = std::max(worst, st.newton_residual);
        max_outer = std::max(max_outer, st.picard_iters);
        if (!(st.newton_residual <= 1e-12) || st.picard_iters > 100) o.pass = false;
      });
    } catch (const Error& e) {
      o.pass = false;
      o.detail = "tau " + fmt(tau) + ": " + e.what() + "; ";
    }
  }
  o.detail += "max Newton residual " + fmt(worst) + ", max outer iterations " + std::to_string(max_outer);
  return o;
}

// Criteria 5, 6 and 7 share one 1000-step trajectory.
struct LongRun {
  double mass = 0.0, div = 0.0, mu_mean = 0.0;
};

const LongRun& long_run() {
  static const LongRun result = [] {
    LongRun r;
    const Discretization disc(build_crossed_mesh({}, 16));
    Params params;
    params.final_time = 1000 * params.tau;
    params.theta = 10.0;
    march(disc, params, 1000, [&](const State&, const State& next, const StepStats&) {
      const InvariantResiduals inv = invariant_residuals(disc, next, params);
      r.mass = std::max(r.mass, inv.mass_dev);
      r.div = std::max(r.div, inv.div_res);
      r.mu_mean = std::max(r.mu_mean, inv.mu_mean_res);
    });
    return r;
  }();
  return result;
}

Outcome mass_conservation() {
  const double v = long_run().mass;
  return {v <= 1e-10, "max |(phi - phibar0, 1)| over 1000 steps " + fmt(v)};
}

Outcome incompressibility() {
  const double v = long_run().div;
  return {v <= 1e-10, "max_q |c(u, q)| over 1000 steps " + fmt(v)};
}

Outcome mu_mean() {
  const double v = long_run().mu_mean;
  return {v <= 1e-9, "max mu-mean residual over 1000 steps " + fmt(v)};
}

Outcome operator_oracles() {
  Outcome o;
  const Discretization disc(build_crossed_mesh({}, 2));
  const auto& ws = disc.neg_norm_workspace();
  const Eigen::MatrixXd k = testing::dense(disc.stiffness()), m = testing::dense(disc.mass());
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, m);
  std::mt19937 rng(2024);
  double norm_err = 0.0, adj_err = 0.0, sym_err = 0.0, coer_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Vector z = testing::random_mean_zero(disc, rng), w = testing::random_mean_zero(disc, rng);
    // sup over mean-zero chi of (z, chi) / |grad chi| = sqrt(sum (b . v_i)^2 / lambda_i), b = M z
    const Vector b = m * z;
    double sum = 0.0;
    for (int i = 0; i < k.rows(); ++i)
      if (eig.eigenvalues()[i] > 1e-10) sum += std::pow(b.dot(eig.eigenvectors().col(i)), 2) / eig.eigenvalues()[i];
    norm_err = std::max(norm_err, std::abs(ws.norm(z) - std::sqrt(sum)) / std::sqrt(sum));
    const double tzw = ws.apply(z).dot(m * w), ztw = z.dot(m * ws.apply(w));
    adj_err = std::max(adj_err, std::abs(tzw - ztw) / std::max(1.0, std::abs(tzw)));

    Params params;
    params.gamma = 0.7;
    const FeFunction phi(disc.scalar_space(), testing::random_vector(z.size(), rng));
    const EllForm ell(disc, phi, params, 1e-2);
    const FeFunction zf(disc.scalar_space(), z), wf(disc.scalar_space(), w);
    const double lzw = ell(zf, wf), lwz = ell(wf, zf), lzz = ell(zf, zf);
    sym_err = std::max(sym_err, std::abs(lzw - lwz) / std::max(1.0, std::abs(lzw)));
    const double floor = params.epsilon * z.dot(k * z);
    coer_err = std::max(coer_err, (floor - lzz) / std::max(1.0, lzz));
  }
  o.pass = norm_err <= 1e-8 && adj_err <= 1e-11 && sym_err <= 1e-10 && coer_err <= 1e-10;
  o.detail = "neg_norm rel err " + fmt(norm_err) + ", T_h adjointness " + fmt(adj_err) + ", ell symmetry " +
             fmt(sym_err) + ", coercivity deficit " + fmt(std::max(0.0, coer_err));
  return o;
}

Outcome projection_rates() {
  const double pi = M_PI;
  const ScalarField f{[=](const Point& p) { return std::cos(pi * p.x) * std::cos(pi * p.y); },
                      [=](const Point& p) {
                        return Vec2{-pi * std::sin(pi * p.x) * std::cos(pi * p.y), -pi * std::cos(pi * p.x) * std::sin(pi * p.y)};
                      }};
  const VectorField u{[=](const Point& p) {
                        const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
                        return Vec2{2 * pi * sx * sx * sy * std::cos(pi * p.y), -2 * pi * sy * sy * sx * std::cos(pi * p.x)};
                      },
                      [=](const Point& p) {
                        const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
                        const double cx = std::cos(pi * p.x), cy = std::cos(pi * p.y), c = 2 * pi * pi;
                        return Mat2{2 * c * sx * cx * sy * cy, c * sx * sx * (cy * cy - sy * sy),
                                    -c * sy * sy * (cx * cx - sx * sx), -2 * c * sx * cx * sy * cy};
                      }};
  std::vector<double> hs, ritz, l2, ds;
  for (int n : {8, 16, 32}) {
    const Discretization disc(build_crossed_mesh({}, n));
    hs.push_back(disc.mesh().h());
    ritz.push_back(error_norm(ritz_projection(f, disc.scalar_space()), f, NormKind::H1));
    l2.push_back(error_norm(l2_projection(f.value, disc.scalar_space()), f, NormKind::L2));
    ds.push_back(error_norm(darcy_stokes_projection(disc, u, std::nullopt, 1.0, 1.0).velocity, u, NormKind::H1));
  }
  const double r1 = testing::fitted_rate(hs, ritz), r2 = testing::fitted_rate(hs, l2), r3 = testing::fitted_rate(hs, ds);
  return {std::abs(r1 - 1) <= 0.2 && std::abs(r2 - 2) <= 0.2 && std::abs(r3 - 2) <= 0.2,
          "Ritz H1 " + fmt(r1) + ", L2 projection " + fmt(r2) + ", Darcy-Stokes velocity H1 " + fmt(r3)};
}

Outcome long_range_run() {
  Outcome o;
  const Discretization disc(build_crossed_mesh({}, 32));
  Params params;
  params.epsilon = 0.02;
  params.gamma = 0.4;
  params.eta = 0.0;
  params.theta = 15000.0;
  params.tau = 1e-3;
  params.final_time = 0.2;
  const State s0 = initialize(disc, spinodal(), params);
  const double slack = 1e-10 * energy(disc, s0, params).total;
  double worst = -1e300, min_longrange = 1e300;
  march(disc, params, 200, [&](const State& prev, const State& next, const StepStats&) {
    const EnergyBreakdown e = energy(disc, next, params);
    const double inc = e.total - energy(disc, prev, params).total;
    worst = std::max(worst, inc);
    min_longrange = std::min(min_longrange, e.longrange);
    if (inc > slack || !(e.longrange > 0.0)) o.pass = false;
  });
  o.detail = "largest energy change " + fmt(worst) + " (slack " + fmt(slack) + "), smallest long-range term " +
             fmt(min_longrange);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "Cauchy convergence table (n = 8 .. 64)", table_reproduction},
    {2, "unconditional energy stability", energy_stability},
    {3, "per-step energy-law identity", energy_law},
    {4, "unconditional solvability", solvability},
    {5, "mass conservation", mass_conservation},
    {6, "discrete incompressibility", incompressibility},
    {7, "mu-mean identity", mu_mean},
    {8, "operator oracle equivalence", operator_oracles},
    {9, "projection rates", projection_rates},
    {10, "long-range stability run", long_range_run},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    try {
      selected.insert(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::cerr << "usage: chds_acceptance [criterion ...]\n";
      return 2;
    }
  }
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << "  [" << fmt(secs) << " s]" << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
