#include "chds/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chds/assembly.hpp"
#include "chds/operators.hpp"

namespace chds {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& trip, const SparseMatrix& m, int row0, int col0, double scale) {
  if (scale == 0.0) return;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      trip.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
}

void add_column(Triplets& trip, const Vector& v, int row0, int col) {
  for (int i = 0; i < v.size(); ++i) trip.emplace_back(row0 + i, col, v[i]);
}

void add_row(Triplets& trip, const Vector& v, int row, int col0) {
  for (int i = 0; i < v.size(); ++i) trip.emplace_back(row, col0 + i, v[i]);
}

double h1_norm(const Vector& v, const SparseMatrix& gram) { return std::sqrt(std::max(0.0, v.dot(gram * v))); }

double l2_norm(const Vector& v, const SparseMatrix& mass) { return std::sqrt(std::max(0.0, v.dot(mass * v))); }

}  // namespace

ScalarField spinodal_initial_phi(const Rectangle& d) {
  const double pi = std::numbers::pi;
  const double sx = 1.0 / d.width(), sy = 1.0 / d.height();
  ScalarField f;
  f.value = [=](const Point& p) {
    const double x = (p.x - d.x0) * sx, y = (p.y - d.y0) * sy;
    return 0.5 * (1.0 - std::cos(4.0 * pi * x)) * (1.0 - std::cos(2.0 * pi * y)) - 1.0;
  };
  f.gradient = [=](const Point& p) {
    const double x = (p.x - d.x0) * sx, y = (p.y - d.y0) * sy;
    const double gx = 0.5 * 4.0 * pi * std::sin(4.0 * pi * x) * (1.0 - std::cos(2.0 * pi * y)) * sx;
    const double gy = 0.5 * (1.0 - std::cos(4.0 * pi * x)) * 2.0 * pi * std::sin(2.0 * pi * y) * sy;
    return Vec2{gx, gy};
  };
  return f;
}

VectorField vortex_velocity(const Rectangle& d, double a) {
  const double pi = std::numbers::pi;
  const double sx = 1.0 / d.width(), sy = 1.0 / d.height();
  // stream function a s(x)^2 s(y)^2, u = (d_y psi, -d_x psi)
  VectorField f;
  f.value = [=](const Point& p) {
    const double x = (p.x - d.x0) * sx, y = (p.y - d.y0) * sy;
    const double s2x = std::pow(std::sin(pi * x), 2), s2y = std::pow(std::sin(pi * y), 2);
    const double dsx = pi * std::sin(2.0 * pi * x) * sx, dsy = pi * std::sin(2.0 * pi * y) * sy;
    return Vec2{a * s2x * dsy, -a * dsx * s2y};
  };
  f.jacobian = [=](const Point& p) {
    const double x = (p.x - d.x0) * sx, y = (p.y - d.y0) * sy;
    const double s2x = std::pow(std::sin(pi * x), 2), s2y = std::pow(std::sin(pi * y), 2);
    const double dsx = pi * std::sin(2.0 * pi * x) * sx, dsy = pi * std::sin(2.0 * pi * y) * sy;
    const double ddsx = 2.0 * pi * pi * std::cos(2.0 * pi * x) * sx * sx;
    const double ddsy = 2.0 * pi * pi * std::cos(2.0 * pi * y) * sy * sy;
    return Mat2{a * dsx * dsy, a * s2x * ddsy, -a * ddsx * s2y, -a * dsx * dsy};
  };
  return f;
}

State initialize(const Discretization& disc, const InitialData& data, const Params& params) {
  params.validate();
  if (!data.phi.value) throw Error(ErrorKind::InvalidArgument, "initialize: missing initial phi");
  const SpacePtr& p1 = disc.scalar_space();
  State s;
  s.phi = data.mode == InitMode::Ritz ? ritz_projection(data.phi, p1) : interpolate(p1, data.phi.value);
  s.phi_bar0 = disc.ones_mass().dot(s.phi.coefficients) / disc.area();

  const int n = p1->dof_count();
  const NegNormWorkspace& ws = disc.neg_norm_workspace();
  Vector xi = Vector::Zero(n);
  if (params.theta > 0.0) {
    const Vector centered = s.phi.coefficients - Vector::Constant(n, s.phi_bar0);
    xi = params.theta * ws.apply(centered);
  }
  const Vector cubic = assemble_vector(VectorFormKind::Cubic, s.phi, *p1);
  const Vector rhs = params.epsilon * (disc.stiffness() * s.phi.coefficients) +
                     (cubic - disc.mass() * s.phi.coefficients) / params.epsilon + disc.mass() * xi;
  s.mu = FeFunction(p1, solve_spd(disc.mass(), rhs, 1e-14).x);
  s.xi = FeFunction(disc.pressure_space(), xi);

  if (data.velocity) {
    VelocityPressure vp = darcy_stokes_projection(disc, *data.velocity, std::nullopt, params.lambda, params.eta);
    s.u = std::move(vp.velocity);
  } else {
    s.u = FeFunction(disc.velocity_space());
  }
  s.p = FeFunction(disc.pressure_space());
  return s;
}

struct Stepper::Impl {
  const Discretization& disc;
  const Params& params;
  int n;          // P1 dofs
  int ch_size;    // 2n, or 3n + 1 with the long-range block
  int nf;         // free velocity dofs
  DarcyStokesSolver flow;
  LuFactorization ch_lu;
  bool ch_ready = false;
  double ch_scale;  // residual scale of the phi and mu rows
  double xi_scale;  // and of the long-range rows
  // Last two steps taken by this stepper, for extrapolated initial iterates.
  Vector hist_x_prev, hist_x_last, hist_u_prev, hist_u_last;

  Impl(const Discretization& d, const Params& p)
      : disc(d),
        params(p),
        n(d.scalar_space()->dof_count()),
        ch_size(p.theta > 0.0 ? 3 * n + 1 : 2 * n),
        nf(d.free_velocity_count()),
        flow(d, 1.0 / p.tau + p.eta, p.lambda) {
    const double m_inf = d.ones_mass().lpNorm<Eigen::Infinity>();
    ch_scale = (1.0 + 1.0 / p.epsilon) * m_inf;
    xi_scale = (1.0 + p.theta) * m_inf;
  }

  bool long_range() const { return params.theta > 0.0; }

  // Residual of the Cahn-Hilliard rows. Row a is multiplied by tau.
  Vector ch_residual(const Vector& x, const Vector& phi_prev, const Vector& gu, double phi_bar0) const {
    const double eps = params.epsilon, tau = params.tau;
    const SparseMatrix& m = disc.mass();
    const SparseMatrix& k = disc.stiffness();
    const auto phi = x.head(n);
    const auto mu = x.segment(n, n);
    Vector f(ch_size);
    f.head(n) = m * (phi - phi_prev) + tau * eps * (k * mu) + tau * gu;
    const FeFunction phi_fn(disc.scalar_space(), Vector(phi));
    const Vector cubic = assemble_vector(VectorFormKind::Cubic, phi_fn, *disc.scalar_space());
    f.segment(n, n) = (cubic - m * phi_prev) / eps + eps * (k * phi) - m * mu;
    if (long_range()) {
      const auto xi = x.segment(2 * n, n);
      const double ell = x[3 * n];
      f.segment(n, n) += m * xi;
      f.segment(2 * n, n) = k * xi - params.theta * (m * phi - phi_bar0 * disc.ones_mass()) + ell * disc.ones_mass();
      f[3 * n] = disc.ones_mass().dot(xi);
    }
    return f;
  }

  // Jacobian triplets of the Cahn-Hilliard rows at phi, placed at offset 0.
  void ch_jacobian(Triplets& trip, const Vector& phi) const {
    const double eps = params.epsilon, tau = params.tau;
    const SparseMatrix& m = disc.mass();
    const SparseMatrix& k = disc.stiffness();
    const FeFunction phi_fn(disc.scalar_space(), phi);
    const SparseMatrix j = assemble_matrix(MatrixForm::cubic_jacobian(phi_fn), *disc.scalar_space(),
                                           *disc.scalar_space());
    add_block(trip, m, 0, 0, 1.0);
    add_block(trip, k, 0, n, tau * eps);
    add_block(trip, k, n, 0, eps);
    add_block(trip, j, n, 0, 1.0 / eps);
    add_block(trip, m, n, n, -1.0);
    if (long_range()) {
      add_block(trip, m, n, 2 * n, 1.0);
      add_block(trip, m, 2 * n, 0, -params.theta);
      add_block(trip, k, 2 * n, 2 * n, 1.0);
      add_column(trip, disc.ones_mass(), 2 * n, 3 * n);
      add_row(trip, disc.ones_mass(), 3 * n, 2 * n);
    }
  }

  void factor_ch(const Vector& phi) {
    Triplets trip;
    ch_jacobian(trip, phi);
    SparseMatrix jac(ch_size, ch_size);
    jac.setFromTriplets(trip.begin(), trip.end());
    jac.makeCompressed();
    ch_lu.factorize(jac);
    ch_ready = true;
  }

  double scaled(const Vector& f) const {
    const double r = f.head(2 * n).lpNorm<Eigen::Infinity>() / ch_scale;
    if (!long_range()) return r;
    return std::max(r, f.tail(n + 1).lpNorm<Eigen::Infinity>() / xi_scale);
  }

  // Chord Newton with a residual-halving fallback.
  ChResult solve_ch(const Vector& phi_prev, const Vector& gu, double phi_bar0, Vector x) {
    const double tol = params.newton_tol;
    Vector f = ch_residual(x, phi_prev, gu, phi_bar0);
    double r = scaled(f);
    ChResult out;
    out.history.push_back(r);
    bool fresh = false;
    bool refactor = !ch_ready;
    while (!(r <= tol)) {
      if (!std::isfinite(r)) throw Error(ErrorKind::Solver, "Newton: non-finite residual");
      if (out.iterations >= params.max_newton) break;
      if (refactor) {
        factor_ch(x.head(n));
        fresh = true;
        refactor = false;
      }
      const Vector dx = ch_lu.solve(-f);
      Vector x_new = x + dx;
      Vector f_new = ch_residual(x_new, phi_prev, gu, phi_bar0);
      double r_new = scaled(f_new);
      if (!(r_new < r)) {
        if (!fresh) {
          refactor = true;
          continue;
        }
        double s = 0.5;
        for (; s >= 1.0 / 1024.0; s *= 0.5) {
          x_new = x + s * dx;
          f_new = ch_residual(x_new, phi_prev, gu, phi_bar0);
          r_new = scaled(f_new);
          if (r_new < r) break;
        }
        if (!(r_new < r)) {
          // Roundoff floor: accept if the residual can no longer be reduced near the tolerance.
          if (r <= 100.0 * tol) break;
          std::ostringstream msg;
          msg << "Newton: no residual decrease at iteration " << out.iterations << " (residual " << r << ")";
          throw Error(ErrorKind::Solver, msg.str());
        }
      }
      if (r_new > 0.2 * r) refactor = true;
      fresh = false;
      x = std::move(x_new);
      f = std::move(f_new);
      r = r_new;
      ++out.iterations;
      out.history.push_back(r);
    }
    if (!(r <= tol) && !(r <= 100.0 * tol && out.iterations > 0)) {
      std::ostringstream msg;
      msg << "Newton: not converged after " << out.iterations << " iterations (residual " << r << ", history";
      for (double h : out.history) msg << ' ' << h;
      msg << ")";
      throw Error(ErrorKind::Solver, msg.str());
    }
    out.residual = r;
    out.phi = FeFunction(disc.scalar_space(), x.head(n));
    out.mu = FeFunction(disc.scalar_space(), x.segment(n, n));
    out.xi = FeFunction(disc.pressure_space(), long_range() ? Vector(x.segment(2 * n, n)) : Vector::Zero(n));
    return out;
  }

  Vector ch_guess(const FeFunction& phi, const FeFunction& mu, const FeFunction* xi) const {
    Vector x = Vector::Zero(ch_size);
    x.head(n) = phi.coefficients;
    x.segment(n, n) = mu.coefficients;
    if (long_range() && xi) x.segment(2 * n, n) = xi->coefficients;
    return x;
  }

  std::pair<Vector, Vector> solve_flow(const SparseMatrix& g, const Vector& mu, const Vector& u_prev) const {
    Vector rhs = (disc.velocity_mass() * u_prev) / params.tau;
    if (params.gamma != 0.0) rhs += params.gamma * (g.transpose() * mu);
    return flow.solve(rhs);
  }

  // Newton on the coupled five-field system. Unknowns: [CH block | u_free | p | pressure multiplier].
  void solve_monolithic(const State& s, const SparseMatrix& g, ChResult& ch, FeFunction& u, FeFunction& p,
                        StepStats& stats) {
    const double tau = params.tau, gamma = params.gamma;
    const int np = n;
    const int off_u = ch_size, off_p = ch_size + nf, size = ch_size + nf + np + 1;
    const SparseMatrix gf = disc.restrict_columns(g);
    const SparseMatrix cf = disc.restrict_columns(disc.divergence());
    const SparseMatrix a_full = (1.0 / tau + params.eta) * disc.velocity_mass() + params.lambda * disc.velocity_stiffness();
    SparseMatrix af;
    {
      const SparseMatrix rows = disc.restrict_columns(a_full);
      // a_full is symmetric, so restricting columns of the transpose restricts rows
      const SparseMatrix rt = rows.transpose();
      af = disc.restrict_columns(rt);
    }
    const Vector b_u = disc.restrict_velocity(disc.velocity_mass() * s.u.coefficients) / tau;
    const Vector& ones = disc.ones_mass();

    Vector x = Vector::Zero(size);
    x.head(ch_size) = ch_guess(s.phi, s.mu, &s.xi);
    x.segment(off_u, nf) = disc.restrict_velocity(s.u.coefficients);
    x.segment(off_p, np) = s.p.coefficients;

    const Vector& phi_prev = s.phi.coefficients;
    auto residual = [&](const Vector& z, double& r_ch, double& r_flow) {
      Vector f(size);
      const Vector uf = z.segment(off_u, nf);
      const Vector gu = gf * uf;
      f.head(ch_size) = ch_residual(z.head(ch_size), phi_prev, gu, s.phi_bar0);
      const auto mu = z.segment(n, n);
      const auto pr = z.segment(off_p, np);
      const Vector au = af * uf, ctp = cf.transpose() * pr, gtm = gamma * (gf.transpose() * mu);
      f.segment(off_u, nf) = au - ctp - gtm - b_u;
      f.segment(off_p, np) = -(cf * uf) + z[size - 1] * ones;
      f[size - 1] = ones.dot(pr);
      r_ch = scaled(f.head(ch_size));
      const double flow_scale = au.lpNorm<Eigen::Infinity>() + ctp.lpNorm<Eigen::Infinity>() +
                                gtm.lpNorm<Eigen::Infinity>() + b_u.lpNorm<Eigen::Infinity>();
      const double div_scale = std::max(1.0, uf.lpNorm<Eigen::Infinity>()) * ones.lpNorm<Eigen::Infinity>();
      r_flow = std::max(flow_scale > 0.0 ? f.segment(off_u, nf).lpNorm<Eigen::Infinity>() / flow_scale : 0.0,
                        f.segment(off_p, np + 1).lpNorm<Eigen::Infinity>() / div_scale);
      return f;
    };

    LuFactorization lu;
    double r_ch = 0.0, r_flow = 0.0;
    Vector f = residual(x, r_ch, r_flow);
    double r = std::max(r_ch, r_flow);
    int it = 0;
    std::vector<double> history{r};
    while (!(r <= params.newton_tol)) {
      if (!std::isfinite(r)) throw Error(ErrorKind::Solver, "coupled Newton: non-finite residual");
      if (it >= params.max_newton) break;
      Triplets trip;
      ch_jacobian(trip, x.head(n));
      add_block(trip, gf, 0, off_u, tau);
      add_block(trip, af, off_u, off_u, 1.0);
      add_block(trip, SparseMatrix(cf.transpose()), off_u, off_p, -1.0);
      add_block(trip, SparseMatrix(gf.transpose()), off_u, n, -gamma);
      add_block(trip, cf, off_p, off_u, -1.0);
      add_column(trip, ones, off_p, size - 1);
      add_row(trip, ones, size - 1, off_p);
      SparseMatrix jac(size, size);
      jac.setFromTriplets(trip.begin(), trip.end());
      jac.makeCompressed();
      lu.factorize(jac);
      const Vector dx = lu.solve(-f);
      double s_len = 1.0;
      Vector x_new = x + dx;
      double rc = 0.0, rf = 0.0;
      Vector f_new = residual(x_new, rc, rf);
      double r_new = std::max(rc, rf);
      while (!(r_new < r) && s_len > 1.0 / 1024.0) {
        s_len *= 0.5;
        x_new = x + s_len * dx;
        f_new = residual(x_new, rc, rf);
        r_new = std::max(rc, rf);
      }
      if (!(r_new < r)) {
        if (r <= 100.0 * params.newton_tol) break;
        throw Error(ErrorKind::Solver, "coupled Newton: no residual decrease");
      }
      x = std::move(x_new);
      f = std::move(f_new);
      r = r_new;
      ++it;
      history.push_back(r);
    }
    if (!(r <= 100.0 * params.newton_tol)) {
      std::ostringstream msg;
      msg << "coupled Newton: not converged after " << it << " iterations (residual " << r << ")";
      throw Error(ErrorKind::Solver, msg.str());
    }
    stats.newton_iters += it;
    stats.newton_residual = r;
    stats.monolithic = true;
    ch.phi = FeFunction(disc.scalar_space(), x.head(n));
    ch.mu = FeFunction(disc.scalar_space(), x.segment(n, n));
    ch.xi = FeFunction(disc.pressure_space(), long_range() ? Vector(x.segment(2 * n, n)) : Vector::Zero(n));
    ch.residual = r;
    ch.iterations = it;
    ch.history = std::move(history);
    u = FeFunction(disc.velocity_space(), disc.expand_velocity(x.segment(off_u, nf)));
    p = FeFunction(disc.pressure_space(), x.segment(off_p, np));
  }
};

Stepper::Stepper(const Discretization& disc, const Params& params) : disc_(disc), params_(params) {
  params_.validate();
  impl_ = std::make_unique<Impl>(disc_, params_);
}

Stepper::~Stepper() = default;

ChResult Stepper::solve_ch_block(const FeFunction& phi_prev, const FeFunction& u_fixed, double phi_bar0,
                                 const State* guess) {
  const SparseMatrix g = assemble_matrix(MatrixForm::convection(phi_prev), *disc_.velocity_space(),
                                         *disc_.scalar_space());
  const Vector gu = g * u_fixed.coefficients;
  Vector x;
  if (guess) {
    x = impl_->ch_guess(guess->phi, guess->mu, &guess->xi);
  } else {
    x = impl_->ch_guess(phi_prev, FeFunction(disc_.scalar_space()), nullptr);
  }
  return impl_->solve_ch(phi_prev.coefficients, gu, phi_bar0, std::move(x));
}

std::pair<FeFunction, FeFunction> Stepper::solve_flow_block(const FeFunction& phi_prev, const FeFunction& mu_fixed,
                                                            const FeFunction& u_prev) const {
  const SparseMatrix g = assemble_matrix(MatrixForm::convection(phi_prev), *disc_.velocity_space(),
                                         *disc_.scalar_space());
  auto [u, p] = impl_->solve_flow(g, mu_fixed.coefficients, u_prev.coefficients);
  return {FeFunction(disc_.velocity_space(), std::move(u)), FeFunction(disc_.pressure_space(), std::move(p))};
}

State Stepper::step(const State& s, StepStats* stats_out) {
  StepStats stats;
  const SparseMatrix g = assemble_matrix(MatrixForm::convection(s.phi), *disc_.velocity_space(),
                                         *disc_.scalar_space());
  const SparseMatrix& h1 = disc_.h1_gram();
  const SparseMatrix& vm = disc_.velocity_mass();

  ChResult ch;
  FeFunction u, p;
  bool done = false;
  if (params_.coupling == Coupling::Picard) {
    Vector x = impl_->ch_guess(s.phi, s.mu, &s.xi);
    Vector u_k = s.u.coefficients;
    // Continuing a trajectory: start from the linear extrapolation of the last two steps.
    Impl& h = *impl_;
    if (h.hist_x_last.size() == x.size() && h.hist_x_prev.size() == x.size() && h.hist_x_last == x &&
        h.hist_u_last == u_k) {
      x = 2.0 * h.hist_x_last - h.hist_x_prev;
      u_k = 2.0 * h.hist_u_last - h.hist_u_prev;
    }
    Vector phi_k = s.phi.coefficients;
    double last_change = 0.0;
    try {
      for (int k = 1; k <= params_.max_picard; ++k) {
        ch = impl_->solve_ch(s.phi.coefficients, g * u_k, s.phi_bar0, x);
        stats.newton_iters += ch.iterations;
        stats.newton_residual = ch.residual;
        auto [u_new, p_new] = impl_->solve_flow(g, ch.mu.coefficients, s.u.coefficients);
        stats.picard_iters = k;

        const double dphi = h1_norm(ch.phi.coefficients - phi_k, h1);
        const double du = l2_norm(u_new - u_k, vm);
        const double nphi = h1_norm(ch.phi.coefficients, h1);
        const double nu = l2_norm(u_new, vm);
        const double rel_phi = dphi / std::max(nphi, 1e-300);
        const double rel_u = du <= 1e-14 ? 0.0 : du / std::max(nu, 1e-300);
        const double change = std::max(rel_phi, rel_u);
        stats.picard_history.push_back(change);
        stats.picard_change = change;

        x = impl_->ch_guess(ch.phi, ch.mu, &ch.xi);
        phi_k = ch.phi.coefficients;
        u_k = u_new;
        u = FeFunction(disc_.velocity_space(), std::move(u_new));
        p = FeFunction(disc_.pressure_space(), std::move(p_new));

        if (!std::isfinite(change)) break;
        if (k >= 2 && (rel_phi <= params_.picard_tol || dphi <= 1e-14) && rel_u <= params_.picard_tol) {
          done = true;
          break;
        }
        // Sweeps that no longer contract are abandoned for the coupled solve.
        if (k >= 3 && change > 0.9 * last_change) break;
        last_change = change;
      }
    } catch (const Error&) {
      done = false;
    }
  }
  if (!done) impl_->solve_monolithic(s, g, ch, u, p, stats);

  impl_->hist_x_prev = impl_->ch_guess(s.phi, s.mu, &s.xi);
  impl_->hist_u_prev = s.u.coefficients;
  impl_->hist_x_last = impl_->ch_guess(ch.phi, ch.mu, &ch.xi);
  impl_->hist_u_last = u.coefficients;

  State next;
  next.phi = std::move(ch.phi);
  next.mu = std::move(ch.mu);
  next.xi = std::move(ch.xi);
  next.u = std::move(u);
  next.p = std::move(p);
  next.step = s.step + 1;
  next.time = s.time + params_.tau;
  next.phi_bar0 = s.phi_bar0;
  if (stats_out) *stats_out = std::move(stats);
  return next;
}

}  // namespace chds
