#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>

#include "chds/assembly.hpp"
#include "chds/diagnostics.hpp"
#include "chds/error.hpp"
#include "chds/output.hpp"
#include "chds/scheme.hpp"
#include "chds/simulation.hpp"
#include "support.hpp"

using namespace chds;

namespace {

InitialData spinodal(const Rectangle& d = {}, InitMode mode = InitMode::Interpolate) {
  return InitialData{spinodal_initial_phi(d), std::nullopt, mode};
}

Params small_params(double tau, double T) {
  Params p;
  p.tau = tau;
  p.final_time = T;
  return p;
}

double h1_distance(const Discretization& disc, const Vector& a, const Vector& b) {
  const Vector d = a - b;
  return std::sqrt(d.dot(disc.h1_gram() * d));
}

}  // namespace

TEST_SUITE("scheme") {
  TEST_CASE("initial data") {
    const Discretization disc(build_crossed_mesh({}, 16));
    Params params;
    const State s = initialize(disc, spinodal(), params);
    CHECK(s.step == 0);
    CHECK(s.time == 0.0);
    CHECK(s.phi_bar0 == doctest::Approx(-0.5).epsilon(1e-3));
    CHECK(s.u.coefficients.norm() == 0.0);
    CHECK(s.p.coefficients.norm() == 0.0);
    CHECK(s.xi.coefficients.norm() == 0.0);
    // mu^0 = -eps Delta_h phi + Q_h(phi^3 - phi) / eps
    const Vector rhs = params.epsilon * (disc.stiffness() * s.phi.coefficients) +
                       (assemble_vector(VectorFormKind::Cubic, s.phi, *disc.scalar_space()) -
                        disc.mass() * s.phi.coefficients) /
                           params.epsilon;
    CHECK((disc.mass() * s.mu.coefficients - rhs).norm() < 1e-10 * rhs.norm());

    const State r = initialize(disc, spinodal({}, InitMode::Ritz), params);
    CHECK(r.phi_bar0 == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(error_norm(r.phi, spinodal_initial_phi({}), NormKind::H1) < error_norm(s.phi, spinodal_initial_phi({}), NormKind::H1));

    Params theta = params;
    theta.theta = 10.0;
    const State t = initialize(disc, spinodal(), theta);
    CHECK(std::abs(disc.ones_mass().dot(t.xi.coefficients)) < 1e-12);
    // a(xi, zeta) = theta (phi - phibar0, zeta)
    const Vector centered = t.phi.coefficients.array() - t.phi_bar0;
    CHECK((disc.stiffness() * t.xi.coefficients - 10.0 * disc.mass() * centered).norm() < 1e-9);

    InitialData with_u = spinodal();
    with_u.velocity = vortex_velocity({}, 0.1);
    const State v = initialize(disc, with_u, params);
    CHECK(v.u.coefficients.norm() > 0.0);
    CHECK((disc.divergence() * v.u.coefficients).lpNorm<Eigen::Infinity>() < 1e-13);
    for (int d : disc.velocity_space()->boundary_dofs()) CHECK(v.u.coefficients[d] == 0.0);

    CHECK_THROWS_AS(initialize(disc, InitialData{}, params), Error);
  }

  TEST_CASE("Cahn-Hilliard block against a dense Newton solve") {
    const Discretization disc(build_crossed_mesh({}, 2));
    Params params = small_params(1e-2, 1e-2);
    const State s = initialize(disc, spinodal(), params);
    Stepper stepper(disc, params);
    const ChResult r = stepper.solve_ch_block(s.phi, FeFunction(disc.velocity_space()), s.phi_bar0);

    const int n = disc.scalar_space()->dof_count();
    const Eigen::MatrixXd m = testing::dense(disc.mass()), k = testing::dense(disc.stiffness());
    const double eps = params.epsilon, tau = params.tau;
    Vector x = Vector::Zero(2 * n);
    x.head(n) = s.phi.coefficients;
    for (int it = 0; it < 50; ++it) {
      const FeFunction phi(disc.scalar_space(), x.head(n));
      const Vector mu = x.tail(n);
      Vector f(2 * n);
      f.head(n) = m * (phi.coefficients - s.phi.coefficients) / tau + eps * k * mu;
      f.tail(n) = (assemble_vector(VectorFormKind::Cubic, phi, *disc.scalar_space()) - m * s.phi.coefficients) / eps +
                  eps * k * phi.coefficients - m * mu;
      Eigen::MatrixXd j(2 * n, 2 * n);
      j << m / tau, eps * k, testing::dense(assemble_matrix(MatrixForm::cubic_jacobian(phi), *disc.scalar_space(),
                                                            *disc.scalar_space())) / eps + eps * k,
          -m;
      const Vector dx = j.fullPivLu().solve(-f);
      x += dx;
      if (dx.norm() < 1e-14) break;
    }
    CHECK((r.phi.coefficients - x.head(n)).norm() < 1e-10);
    CHECK((r.mu.coefficients - x.tail(n)).norm() < 1e-8 * x.tail(n).norm());
    CHECK(disc.ones_mass().dot(r.phi.coefficients) == doctest::Approx(disc.ones_mass().dot(s.phi.coefficients)).epsilon(1e-14));
    CHECK(r.iterations >= 1);
  }

  TEST_CASE("flow block solves the momentum equation") {
    const Discretization disc(build_crossed_mesh({}, 4));
    Params params = small_params(1e-2, 1e-2);
    const State s = initialize(disc, spinodal(), params);
    Stepper stepper(disc, params);
    const auto [u, p] = stepper.solve_flow_block(s.phi, s.mu, s.u);
    CHECK((disc.divergence() * u.coefficients).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(std::abs(integrate(p)) < 1e-12);
    // test with v = u: (1/tau + eta)|u|^2 + lambda|grad u|^2 = gamma b(phi, u, mu)
    const SparseMatrix g = assemble_matrix(MatrixForm::convection(s.phi), *disc.velocity_space(), *disc.scalar_space());
    const Vector& uc = u.coefficients;
    const double lhs = (1 / params.tau + params.eta) * uc.dot(disc.velocity_mass() * uc) +
                       params.lambda * uc.dot(disc.velocity_stiffness() * uc);
    CHECK(lhs == doctest::Approx(params.gamma * s.mu.coefficients.dot(g * uc)).epsilon(1e-10));
    // constant mu produces no flow
    const FeFunction c(disc.scalar_space(), Vector::Constant(s.mu.size(), 2.0));
    CHECK(stepper.solve_flow_block(s.phi, c, s.u).first.coefficients.norm() < 1e-12);
  }

  TEST_CASE("a step preserves the invariants and decreases the energy") {
    for (double tau : {1e-3, 1e-1, 1.0}) {
      CAPTURE(tau);
      const Discretization disc(build_crossed_mesh({}, 8));
      Params params = small_params(tau, 3 * tau);
      params.theta = 5.0;
      InitialData data = spinodal();
      data.velocity = vortex_velocity({}, 0.05);
      State s = initialize(disc, data, params);
      Stepper stepper(disc, params);
      for (int m = 0; m < 3; ++m) {
        StepStats stats;
        const State next = stepper.step(s, &stats);
        CHECK(next.step == s.step + 1);
        CHECK(next.time == doctest::Approx(s.time + tau));
        const InvariantResiduals inv = invariant_residuals(disc, next, params);
        CHECK(inv.mass_dev < 1e-12);
        CHECK(inv.div_res < 1e-12);
        CHECK(inv.xi_mean_res < 1e-12);
        CHECK(inv.p_mean_res < 1e-12);
        CHECK(energy(disc, next, params).total <= energy(disc, s, params).total + 1e-12);
        CHECK(std::abs(energy_law_residual(disc, s, next, params)) < 1e-9);
        CHECK(stats.picard_iters >= 1);
        s = next;
      }
    }
  }

  TEST_CASE("unique solvability across step sizes") {
    for (double tau : {1e-4, 1e-2, 1.0, 10.0}) {
      CAPTURE(tau);
      const Discretization disc(build_crossed_mesh({}, 4));
      Params params = small_params(tau, tau);
      InitialData data = spinodal();
      data.velocity = vortex_velocity({}, 0.2);
      const State s = initialize(disc, data, params);
      Stepper stepper(disc, params);
      const State a = stepper.step(s);
      params.coupling = Coupling::Monolithic;
      Stepper mono(disc, params);
      StepStats stats;
      const State b = mono.step(s, &stats);
      CHECK(stats.monolithic);
      CHECK(h1_distance(disc, a.phi.coefficients, b.phi.coefficients) < 1e-8);
      CHECK(h1_distance(disc, a.mu.coefficients, b.mu.coefficients) < 1e-6 * (1 + a.mu.coefficients.norm()));
      CHECK((a.u.coefficients - b.u.coefficients).norm() < 1e-8 * (1 + a.u.coefficients.norm()));
    }
  }

  TEST_CASE("first-order accuracy in time") {
    const Discretization disc(build_crossed_mesh({}, 4));
    std::vector<Vector> finals;
    for (double tau : {2e-3, 1e-3, 5e-4, 2.5e-4}) {
      Params params = small_params(tau, 0.02);
      RunOptions bare;
      bare.diagnostics = false;
      const RunSummary r = run(disc, params, initialize(disc, spinodal(), params), bare);
      finals.push_back(r.final_state.phi.coefficients);
    }
    const double d1 = h1_distance(disc, finals[0], finals[1]);
    const double d2 = h1_distance(disc, finals[1], finals[2]);
    const double d3 = h1_distance(disc, finals[2], finals[3]);
    CHECK(std::log2(d1 / d2) == doctest::Approx(1.0).epsilon(0.15));
    CHECK(std::log2(d2 / d3) == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("params validation") {
    Params p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.step_count() == 3200);
    Params bad = p;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = p;
    bad.omega = 2.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = p;
    bad.tau = 0.3;
    CHECK_THROWS_AS(bad.step_count(), Error);
    bad = p;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK(to_string(Coupling::Picard) == "picard");
    CHECK(to_string(Coupling::Monolithic) == "monolithic");
  }

  TEST_CASE("run loop") {
    const Discretization disc(build_crossed_mesh({}, 4));
    const Params one = small_params(1e-3, 1e-3);
    const RunSummary r1 = run(disc, one, initialize(disc, spinodal(), one));
    CHECK(r1.steps == 1);
    CHECK(r1.final_state.step == 1);

    const auto dir = std::filesystem::temp_directory_path() / "chds_test_run";
    std::filesystem::remove_all(dir);
    const Params ten = small_params(1e-3, 1e-2);
    RunOptions opt;
    opt.csv = dir / "run.csv";
    opt.snapshot_dir = dir / "vtk";
    opt.snapshot_every = 5;
    int observed = 0;
    opt.observer = [&](const StepRecord&, const State&) { ++observed; };
    const RunSummary r = run(disc, ten, initialize(disc, spinodal(), ten), opt);
    CHECK(observed == 10);
    const CsvTable t = read_csv(dir / "run.csv");
    CHECK(t.header == run_csv_header());
    CHECK(t.rows.size() == 10);
    CHECK(t.values("step").back() == 10.0);
    CHECK(std::filesystem::exists(dir / "vtk" / "state_000000.vtk"));
    CHECK(std::filesystem::exists(dir / "vtk" / "state_000005.vtk"));
    CHECK(std::filesystem::exists(dir / "vtk" / "state_000010.vtk"));
    CHECK(r.max_energy_increase <= 0.0);
    CHECK(r.max_mass_dev < 1e-12);
    std::filesystem::remove_all(dir);
  }
}
