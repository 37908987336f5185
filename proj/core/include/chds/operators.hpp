#pragma once

#include <optional>
#include <utility>

#include "chds/discretization.hpp"
#include "chds/fe_space.hpp"
#include "chds/linalg.hpp"
#include "chds/params.hpp"

namespace chds {

/// Discrete inverse Laplacian T_h on mean-zero P1 functions and the induced -1,h inner product.
/// Built once per mesh; the bordered Neumann factorization is reused by every call.
class NegNormWorkspace {
 public:
  explicit NegNormWorkspace(SpacePtr p1);
  NegNormWorkspace(SpacePtr p1, const SparseMatrix& mass, const SparseMatrix& stiffness);

  const FeSpace& space() const { return *space_; }
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const Vector& ones_mass() const { return solver_.constraint(); }

  /// Coefficients of T_h(zeta). Throws chds::Error (InvalidArgument) when |(zeta, 1)| / |Omega|
  /// exceeds mean_tol.
  Vector apply(const Vector& zeta, double mean_tol = 1e-10) const;
  /// (zeta, xi)_{-1,h} = (zeta, T_h xi).
  double inner(const Vector& zeta, const Vector& xi) const;
  double norm(const Vector& zeta) const;

 private:
  SpacePtr space_;
  SparseMatrix mass_, stiffness_;
  ConstrainedPoissonSolver solver_;
  double area_;
};

FeFunction apply_Th(const FeFunction& zeta, const NegNormWorkspace& ws);
double neg_norm(const FeFunction& zeta, const NegNormWorkspace& ws);

/// Delta_h v: the mean-zero P1 function with (Delta_h v, chi) = -a(v, chi) for all chi.
FeFunction discrete_laplacian(const FeFunction& v, const NegNormWorkspace& ws);
FeFunction discrete_laplacian(const FeFunction& v);

/// Ritz projection R_h onto a scalar space: a(R_h f - f, chi) = 0 and (R_h f - f, 1) = 0.
FeFunction ritz_projection(const ScalarField& f, const SpacePtr& space);

/// L2 projection Q_h onto a scalar space.
FeFunction l2_projection(const std::function<double(const Point&)>& f, const SpacePtr& space);

struct VelocityPressure {
  FeFunction velocity;
  FeFunction pressure;
};

/// Darcy-Stokes projection (P_h u, P_h p) with coefficients lambda (viscosity) and eta (drag).
/// `p0` may be left empty for zero pressure data.
VelocityPressure darcy_stokes_projection(const Discretization& disc, const VectorField& u0,
                                         const std::optional<ScalarField>& p0, double lambda, double eta);

/// The bilinear form
///   ell(mu1, mu2) = eps a(mu1, mu2) + b(phi_prev, u(mu1), mu2)
/// where u(mu) solves the auxiliary flow problem with drag eta + 1/tau and forcing
/// gamma b(phi_prev, v, mu). The flow factorization is cached, so repeated evaluations
/// with the same phi_prev and tau are cheap.
class EllForm {
 public:
  EllForm(const Discretization& disc, const FeFunction& phi_prev, const Params& params, double tau);

  /// u(mu) (all velocity dofs).
  Vector velocity(const FeFunction& mu) const;
  double operator()(const FeFunction& mu1, const FeFunction& mu2) const;

 private:
  const Discretization& disc_;
  Params params_;
  SparseMatrix convection_;  // rows: P1 test, cols: all velocity dofs
  DarcyStokesSolver flow_;
};

double ell_form(const Discretization& disc, const FeFunction& mu1, const FeFunction& mu2, const FeFunction& phi_prev,
                const Params& params, double tau);

}  // namespace chds
