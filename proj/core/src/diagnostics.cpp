#include "chds/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "chds/assembly.hpp"
#include "chds/operators.hpp"

namespace chds {

namespace {

void require_same_mesh(const Discretization& disc, const State& s) {
  if (!s.phi.space || &s.phi.space->mesh() != &disc.mesh() || !s.u.space || &s.u.space->mesh() != &disc.mesh())
    throw Error(ErrorKind::InvalidArgument, "state does not live on this mesh");
}

double quad(const Vector& v, const SparseMatrix& m) { return v.dot(m * v); }

// Integral of g(a, b) over the domain for P1 coefficient vectors a, b, by the 7-point rule.
template <class G>
double integrate_p1(const Mesh& mesh, const Vector& a, const Vector& b, G g) {
  const Quadrature& q = triangle_quadrature();
  double total = 0.0;
  const auto& tris = mesh.triangles();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Triangle& tri = tris[t];
    double local = 0.0;
    for (int k = 0; k < Quadrature::size; ++k) {
      const auto& l = q.barycentric[k];
      const double av = l[0] * a[tri[0]] + l[1] * a[tri[1]] + l[2] * a[tri[2]];
      const double bv = l[0] * b[tri[0]] + l[1] * b[tri[1]] + l[2] * b[tri[2]];
      local += q.weight[k] * g(av, bv);
    }
    total += local * mesh.signed_area(t);
  }
  return total;
}

}  // namespace

EnergyBreakdown energy(const Discretization& disc, const State& s, const Params& params) {
  require_same_mesh(disc, s);
  EnergyBreakdown e;
  const Vector& phi = s.phi.coefficients;
  if (params.gamma > 0.0) e.kinetic = quad(s.u.coefficients, disc.velocity_mass()) / (2.0 * params.gamma);
  e.double_well = integrate_p1(disc.mesh(), phi, phi, [](double a, double) { return (a * a - 1.0) * (a * a - 1.0); }) /
                  (4.0 * params.epsilon);
  e.gradient = 0.5 * params.epsilon * quad(phi, disc.stiffness());
  if (params.theta > 0.0) {
    const Vector centered = phi - Vector::Constant(phi.size(), s.phi_bar0);
    const double nn = disc.neg_norm_workspace().norm(centered);
    e.longrange = 0.5 * params.theta * nn * nn;
  }
  e.total = e.kinetic + e.double_well + e.gradient + e.longrange;
  return e;
}

double dissipation(const Discretization& disc, const State& next, const Params& params) {
  double d = params.epsilon * quad(next.mu.coefficients, disc.stiffness());
  if (params.gamma > 0.0)
    d += (params.lambda * quad(next.u.coefficients, disc.velocity_stiffness()) +
          params.eta * quad(next.u.coefficients, disc.velocity_mass())) /
         params.gamma;
  return params.tau * d;
}

double energy_law_residual(const Discretization& disc, const State& prev, const State& next, const Params& params) {
  require_same_mesh(disc, prev);
  require_same_mesh(disc, next);
  const double eps = params.epsilon;
  const Vector& a = next.phi.coefficients;
  const Vector& b = prev.phi.coefficients;
  const Vector dphi = a - b;
  const Vector du = next.u.coefficients - prev.u.coefficients;

  const double de = energy(disc, next, params).total - energy(disc, prev, params).total;
  // tau^2 |delta_tau x|^2 = |x^m - x^{m-1}|^2
  double remainder = 0.5 * eps * quad(dphi, disc.stiffness());
  remainder += integrate_p1(disc.mesh(), a, b, [eps](double x, double y) {
    const double d = x - y;
    const double dsq = x * x - y * y;
    return dsq * dsq / (4.0 * eps) + x * x * d * d / (2.0 * eps) + d * d / (2.0 * eps);
  });
  if (params.gamma > 0.0) remainder += quad(du, disc.velocity_mass()) / (2.0 * params.gamma);
  if (params.theta > 0.0) {
    const double nn = disc.neg_norm_workspace().norm(dphi);
    remainder += 0.5 * params.theta * nn * nn;
  }
  return de + dissipation(disc, next, params) + remainder;
}

InvariantResiduals invariant_residuals(const Discretization& disc, const State& s, const Params& params) {
  require_same_mesh(disc, s);
  InvariantResiduals r;
  const Vector& ones = disc.ones_mass();
  r.mass_dev = std::abs(ones.dot(s.phi.coefficients) - s.phi_bar0 * disc.area());
  r.div_res = (disc.divergence() * s.u.coefficients).lpNorm<Eigen::Infinity>();
  const double cubic = assemble_vector(VectorFormKind::Cubic, s.phi, *disc.scalar_space()).sum();
  const double mean_mu = ones.dot(s.mu.coefficients) / disc.area();
  r.mu_mean_res = std::abs(mean_mu - (cubic / disc.area() - s.phi_bar0) / params.epsilon);
  r.xi_mean_res = s.xi.space ? std::abs(ones.dot(s.xi.coefficients)) : 0.0;
  r.p_mean_res = s.p.space ? std::abs(ones.dot(s.p.coefficients)) : 0.0;
  return r;
}

void StabilityMonitor::observe(const State& prev, const State& next, double tau) {
  sum_grad_mu_ += tau * quad(next.mu.coefficients, disc_.stiffness());
  sum_grad_u_ += tau * quad(next.u.coefficients, disc_.velocity_stiffness());
  sum_dphi_ += quad(next.phi.coefficients - prev.phi.coefficients, disc_.h1_gram());
  const double mu = std::sqrt(quad(next.mu.coefficients, disc_.mass()));
  const FeFunction lap = discrete_laplacian(next.phi, disc_.neg_norm_workspace());
  const double lp = std::sqrt(quad(lap.coefficients, disc_.mass()));
  if (std::isfinite(last_mu_) && last_mu_ > 0.0) max_growth_ = std::max(max_growth_, mu / last_mu_);
  if (std::isfinite(last_lap_) && last_lap_ > 0.0) max_growth_ = std::max(max_growth_, lp / last_lap_);
  last_mu_ = mu;
  last_lap_ = lp;
  max_mu_ = std::max(max_mu_, mu);
  max_lap_ = std::max(max_lap_, lp);
}

}  // namespace chds
