#include "chds/operators.hpp"

#include <cmath>
#include <string>

#include "chds/assembly.hpp"

namespace chds {

NegNormWorkspace::NegNormWorkspace(SpacePtr p1)
    : NegNormWorkspace(p1, assemble_matrix(MatrixForm::mass(), *p1, *p1),
                       assemble_matrix(MatrixForm::stiffness(), *p1, *p1)) {}

NegNormWorkspace::NegNormWorkspace(SpacePtr p1, const SparseMatrix& mass, const SparseMatrix& stiffness)
    : space_(std::move(p1)),
      mass_(mass),
      stiffness_(stiffness),
      solver_(stiffness, mass * Vector::Ones(mass.rows())),
      area_(space_->mesh().domain().area()) {
  if (space_->family() != Family::P1) throw Error(ErrorKind::InvalidArgument, "NegNormWorkspace: P1 space required");
}

Vector NegNormWorkspace::apply(const Vector& zeta, double mean_tol) const {
  const double mean = ones_mass().dot(zeta) / area_;
  if (std::abs(mean) > mean_tol)
    throw Error(ErrorKind::InvalidArgument, "T_h: argument has nonzero mean " + std::to_string(mean));
  return solver_.solve(mass_ * zeta);
}

double NegNormWorkspace::inner(const Vector& zeta, const Vector& xi) const {
  return (mass_ * zeta).dot(apply(xi));
}

double NegNormWorkspace::norm(const Vector& zeta) const { return std::sqrt(std::max(0.0, inner(zeta, zeta))); }

FeFunction apply_Th(const FeFunction& zeta, const NegNormWorkspace& ws) {
  if (&zeta.space->mesh() != &ws.space().mesh()) throw Error(ErrorKind::InvalidArgument, "apply_Th: mesh mismatch");
  return FeFunction(zeta.space, ws.apply(zeta.coefficients));
}

double neg_norm(const FeFunction& zeta, const NegNormWorkspace& ws) {
  if (&zeta.space->mesh() != &ws.space().mesh()) throw Error(ErrorKind::InvalidArgument, "neg_norm: mesh mismatch");
  return ws.norm(zeta.coefficients);
}

FeFunction discrete_laplacian(const FeFunction& v, const NegNormWorkspace& ws) {
  const Vector rhs = -(ws.stiffness() * v.coefficients);
  return FeFunction(v.space, solve_spd(ws.mass(), rhs, 1e-14).x);
}

FeFunction discrete_laplacian(const FeFunction& v) {
  if (v.space->family() != Family::P1) throw Error(ErrorKind::InvalidArgument, "discrete_laplacian: P1 function required");
  const SparseMatrix m = assemble_matrix(MatrixForm::mass(), *v.space, *v.space);
  const SparseMatrix k = assemble_matrix(MatrixForm::stiffness(), *v.space, *v.space);
  return FeFunction(v.space, solve_spd(m, Vector(-(k * v.coefficients)), 1e-14).x);
}

FeFunction ritz_projection(const ScalarField& f, const SpacePtr& space) {
  if (space->components() != 1) throw Error(ErrorKind::InvalidArgument, "ritz_projection: scalar space required");
  if (!f.gradient) throw Error(ErrorKind::InvalidArgument, "ritz_projection: the field needs a gradient");
  const SparseMatrix k = assemble_matrix(MatrixForm::stiffness(), *space, *space);
  const SparseMatrix m = assemble_matrix(MatrixForm::mass(), *space, *space);
  const Vector ones = m * Vector::Ones(space->dof_count());
  const Vector rhs = assemble_gradient_load(*space, f.gradient);
  const double mean = assemble_load(*space, f.value).sum();
  return FeFunction(space, ConstrainedPoissonSolver(k, ones).solve(rhs, mean));
}

FeFunction l2_projection(const std::function<double(const Point&)>& f, const SpacePtr& space) {
  if (space->components() != 1) throw Error(ErrorKind::InvalidArgument, "l2_projection: scalar space required");
  const SparseMatrix m = assemble_matrix(MatrixForm::mass(), *space, *space);
  return FeFunction(space, solve_spd(m, assemble_load(*space, f), 1e-14).x);
}

VelocityPressure darcy_stokes_projection(const Discretization& disc, const VectorField& u0,
                                         const std::optional<ScalarField>& p0, double lambda, double eta) {
  if (!(lambda > 0.0) || eta < 0.0)
    throw Error(ErrorKind::InvalidArgument, "darcy_stokes_projection: need lambda > 0 and eta >= 0");
  const FeSpace& p2 = *disc.p2_space();
  const int n = p2.dof_count();
  Vector rhs = Vector::Zero(disc.velocity_space()->dof_count());
  for (int c = 0; c < 2; ++c) {
    Vector block = eta * assemble_load(p2, [&](const Point& x) { return u0.value(x)[c]; });
    if (u0.jacobian)
      block += lambda * assemble_gradient_load(p2, [&](const Point& x) {
                 const Mat2 j = u0.jacobian(x);
                 return Vec2{j[2 * c], j[2 * c + 1]};
               });
    else if (lambda != 0.0)
      throw Error(ErrorKind::InvalidArgument, "darcy_stokes_projection: the velocity needs a jacobian");
    if (p0) {
      // -c(v, p0) moved to the right-hand side: -(d_c psi, p0)
      block -= assemble_gradient_load(p2, [&](const Point& x) {
        const double p = p0->value(x);
        return c == 0 ? Vec2{p, 0.0} : Vec2{0.0, p};
      });
    }
    rhs.segment(c * n, n) = block;
  }
  Vector continuity;
  if (u0.jacobian) {
    continuity = assemble_load(*disc.scalar_space(), [&](const Point& x) {
      const Mat2 j = u0.jacobian(x);
      return j[0] + j[3];
    });
  } else {
    continuity = Vector::Zero(disc.scalar_space()->dof_count());
  }
  const DarcyStokesSolver solver(disc, eta, lambda);
  auto [u, p] = solver.solve(rhs, &continuity);
  return {FeFunction(disc.velocity_space(), std::move(u)), FeFunction(disc.pressure_space(), std::move(p))};
}

EllForm::EllForm(const Discretization& disc, const FeFunction& phi_prev, const Params& params, double tau)
    : disc_(disc),
      params_(params),
      convection_(assemble_matrix(MatrixForm::convection(phi_prev), *disc.velocity_space(), *disc.scalar_space())),
      flow_(disc, params.eta + 1.0 / tau, params.lambda) {}

Vector EllForm::velocity(const FeFunction& mu) const {
  const Vector rhs = params_.gamma * (convection_.transpose() * mu.coefficients);
  return flow_.solve(rhs).first;
}

double EllForm::operator()(const FeFunction& mu1, const FeFunction& mu2) const {
  const Vector u = velocity(mu1);
  return params_.epsilon * mu1.coefficients.dot(disc_.stiffness() * mu2.coefficients) +
         mu2.coefficients.dot(convection_ * u);
}

double ell_form(const Discretization& disc, const FeFunction& mu1, const FeFunction& mu2, const FeFunction& phi_prev,
                const Params& params, double tau) {
  return EllForm(disc, phi_prev, params, tau)(mu1, mu2);
}

}  // namespace chds
