#pragma once

#include <limits>

#include "chds/discretization.hpp"
#include "chds/params.hpp"
#include "chds/scheme.hpp"

namespace chds {

/// Terms of the discrete energy
///   E = 1/(2 gamma) |u|^2 + 1/(4 eps) |phi^2 - 1|^2 + eps/2 |grad phi|^2 + theta/2 |phi - phibar0|_{-1,h}^2.
/// With gamma = 0 the velocity is identically zero and the kinetic term is reported as 0.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double double_well = 0.0;
  double gradient = 0.0;
  double longrange = 0.0;
  double total = 0.0;
};

EnergyBreakdown energy(const Discretization& disc, const State& state, const Params& params);

/// Physical dissipation tau [eps |grad mu|^2 + lambda/gamma |grad u|^2 + eta/gamma |u|^2] of a step.
double dissipation(const Discretization& disc, const State& next, const Params& params);

/// Left side of the per-step energy identity: the energy change plus the physical dissipation
/// plus the numerical dissipation of the convex splitting. Zero up to solver accuracy.
double energy_law_residual(const Discretization& disc, const State& prev, const State& next, const Params& params);

struct InvariantResiduals {
  double mass_dev = 0.0;     // |(phi - phibar0, 1)|
  double div_res = 0.0;      // max_q |c(u, q)|
  double mu_mean_res = 0.0;  // |mean(mu) - (|Omega|^-1 (phi^3, 1) - phibar0) / eps|
  double xi_mean_res = 0.0;  // |(xi, 1)|
  double p_mean_res = 0.0;   // |(p, 1)|
};

InvariantResiduals invariant_residuals(const Discretization& disc, const State& state, const Params& params);

/// Running sums and maxima of the stability quantities over a trajectory.
class StabilityMonitor {
 public:
  explicit StabilityMonitor(const Discretization& disc) : disc_(disc) {}

  void observe(const State& prev, const State& next, double tau);

  double sum_grad_mu() const { return sum_grad_mu_; }      // tau sum |grad mu^m|^2
  double sum_grad_u() const { return sum_grad_u_; }        // tau sum |grad u^m|^2
  double sum_phi_increment() const { return sum_dphi_; }   // sum |phi^m - phi^{m-1}|_{H1}^2
  double max_mu_l2() const { return max_mu_; }             // max |mu^m|
  double max_laplacian_phi() const { return max_lap_; }    // max |Delta_h phi^m|
  /// Largest ratio of consecutive max_laplacian / max_mu values seen; a blow-up shows up here.
  double max_growth() const { return max_growth_; }

 private:
  const Discretization& disc_;
  double sum_grad_mu_ = 0.0, sum_grad_u_ = 0.0, sum_dphi_ = 0.0;
  double max_mu_ = 0.0, max_lap_ = 0.0, max_growth_ = 0.0;
  double last_mu_ = std::numeric_limits<double>::quiet_NaN(), last_lap_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace chds
