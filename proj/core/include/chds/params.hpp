#pragma once

#include <string_view>

namespace chds {

/// How the Cahn-Hilliard and flow blocks of one time step are coupled.
enum class Coupling {
  Picard,      // block Gauss-Seidel sweeps; falls back to Monolithic if the sweeps stop contracting
  Monolithic,  // Newton on the fully coupled five-field system
};

std::string_view to_string(Coupling c);

/// Model and discretization constants. Defaults are the spinodal-decomposition setup used for
/// the Cauchy convergence study (gamma is not fixed by that setup; 1 is assumed).
struct Params {
  double epsilon = 6.25e-2;  // interface width
  double gamma = 1.0;        // capillary coupling
  double lambda = 1.0;       // viscosity
  double eta = 1.0;          // Darcy drag
  double theta = 0.0;        // long-range (Ohta-Kawasaki) strength
  double omega = 1.0;        // inertia; only 1 is supported
  double tau = 1.25e-4;
  double final_time = 0.4;

  double picard_tol = 1e-9;
  double newton_tol = 1e-12;
  double linear_tol = 1e-12;
  int max_picard = 100;
  int max_newton = 50;
  Coupling coupling = Coupling::Picard;

  /// Throws chds::Error (Config) naming the first violated constraint.
  void validate() const;
  /// Number of steps round(T / tau); throws unless tau divides T to 1e-12.
  int step_count() const;
};

}  // namespace chds
