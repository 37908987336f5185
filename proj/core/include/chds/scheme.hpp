#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "chds/discretization.hpp"
#include "chds/fe_space.hpp"
#include "chds/params.hpp"

namespace chds {

/// The five fields at one time level.
struct State {
  FeFunction phi, mu, xi;  // P1; xi is mean-zero
  FeFunction u;            // P2 vector, zero on the boundary
  FeFunction p;            // P1, mean-zero
  int step = 0;
  double time = 0.0;
  double phi_bar0 = 0.0;  // mass average of phi^0
};

enum class InitMode { Interpolate, Ritz };

struct InitialData {
  ScalarField phi;                    // gradient required for InitMode::Ritz
  std::optional<VectorField> velocity;  // empty: u^0 = 0
  InitMode mode = InitMode::Interpolate;
};

/// 1/2 (1 - cos 4 pi x)(1 - cos 2 pi y) - 1, with x and y rescaled to the unit square.
ScalarField spinodal_initial_phi(const Rectangle& domain);
/// curl of a * sin^2(pi x) sin^2(pi y) on the rescaled unit square; vanishes on the boundary.
VectorField vortex_velocity(const Rectangle& domain, double amplitude);

/// phi^0 by interpolation or Ritz projection, u^0 by the Darcy-Stokes projection (or zero),
/// mu^0 and xi^0 from phi^0, p^0 = 0.
State initialize(const Discretization& disc, const InitialData& data, const Params& params);

/// Iteration counts and residuals of one time step.
struct StepStats {
  int picard_iters = 0;
  int newton_iters = 0;  // summed over all Newton solves of the step
  bool monolithic = false;  // the Picard sweeps were abandoned for the coupled Newton solve
  double picard_change = 0.0;
  double newton_residual = 0.0;  // final scaled residual of the last Newton solve
  std::vector<double> picard_history;
};

struct ChResult {
  FeFunction phi, mu, xi;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

/// Time stepper for one mesh and one step size. Holds the factorized flow operator and the
/// Cahn-Hilliard Jacobian factorization, which is reused (chord Newton) while it still
/// contracts well.
class Stepper {
 public:
  Stepper(const Discretization& disc, const Params& params);
  ~Stepper();
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;

  const Params& params() const { return params_; }
  const Discretization& discretization() const { return disc_; }

  /// Newton solve of the Cahn-Hilliard block with a frozen velocity. `guess` (phi, mu, xi)
  /// defaults to (phi_prev, 0, 0).
  ChResult solve_ch_block(const FeFunction& phi_prev, const FeFunction& u_fixed, double phi_bar0,
                          const State* guess = nullptr);

  /// Taylor-Hood solve of the flow block with a frozen chemical potential.
  std::pair<FeFunction, FeFunction> solve_flow_block(const FeFunction& phi_prev, const FeFunction& mu_fixed,
                                                     const FeFunction& u_prev) const;

  /// One step of the scheme. Picard sweeps over the two blocks; if they stop contracting the
  /// coupled system is solved by Newton instead. Throws chds::Error (Solver) on failure.
  State step(const State& state, StepStats* stats = nullptr);

 private:
  struct Impl;
  const Discretization& disc_;
  Params params_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chds
