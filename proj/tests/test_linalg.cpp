#include <doctest.h>

#include <Eigen/Dense>

#include "chds/assembly.hpp"
#include "chds/discretization.hpp"
#include "chds/linalg.hpp"
#include "support.hpp"

using namespace chds;

namespace {

SparseMatrix sparse(const Eigen::MatrixXd& d) { return d.sparseView(); }

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("identity system") {
    SparseMatrix id(6, 6);
    id.setIdentity();
    const Vector b = Vector::LinSpaced(6, 1.0, 6.0);
    const SolveResult r = solve_spd(id, b);
    CHECK((r.x - b).norm() < 1e-15);
    CHECK(r.report.converged);
  }

  TEST_CASE("mass matrix solve recovers the constant") {
    const Discretization disc(build_crossed_mesh({}, 8));
    const SolveResult r = solve_spd(disc.mass(), disc.ones_mass(), 1e-12, 0);
    CHECK(r.report.method == SolveMethod::ConjugateGradient);
    CHECK((r.x.array() - 1.0).abs().maxCoeff() < 1e-10);
    CHECK(r.report.residual <= 1e-12);
  }

  TEST_CASE("small SPD system against a dense solve") {
    std::mt19937 rng(1);
    Eigen::MatrixXd a(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) a(i, j) = testing::random_vector(1, rng)[0];
    a = a * a.transpose() + 5.0 * Eigen::MatrixXd::Identity(5, 5);
    const Vector b = testing::random_vector(5, rng);
    const Vector ref = a.fullPivLu().solve(b);
    CHECK((solve_spd(sparse(a), b).x - ref).norm() < 1e-12 * ref.norm());
    CHECK((solve_spd(sparse(a), b, 1e-13, 0).x - ref).norm() < 1e-11 * ref.norm());
    CHECK((solve_indefinite(sparse(a), b).x - ref).norm() < 1e-12 * ref.norm());
  }

  TEST_CASE("indefinite systems") {
    Eigen::MatrixXd a(2, 2);
    a << 0, 1, 1, 0;
    const Vector x = solve_indefinite(sparse(a), Vector::Ones(2) * 3).x;
    CHECK(x[0] == doctest::Approx(3.0));
    CHECK(x[1] == doctest::Approx(3.0));

    const Discretization disc(build_crossed_mesh({}, 4));
    Eigen::MatrixXd vs = testing::dense(disc.velocity_stiffness());
    const auto& free = disc.free_velocity_dofs();
    const int nf = static_cast<int>(free.size());
    const int np = disc.pressure_space()->dof_count();
    const Eigen::MatrixXd c = testing::dense(disc.restrict_columns(disc.divergence()));
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(nf + np + 1, nf + np + 1);
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nf; ++j) s(i, j) = vs(free[i], free[j]);
    s.block(0, nf, nf, np) = -c.transpose();
    s.block(nf, 0, np, nf) = -c;
    s.block(nf, nf + np, np, 1) = disc.ones_mass();
    s.block(nf + np, nf, 1, np) = disc.ones_mass().transpose();
    std::mt19937 rng(2);
    Vector b = Vector::Zero(nf + np + 1);
    b.head(nf) = testing::random_vector(nf, rng);
    const Vector ref = s.fullPivLu().solve(b);
    CHECK((solve_indefinite(sparse(s), b).x - ref).norm() < 1e-10 * ref.norm());
  }

  TEST_CASE("singular matrix is reported") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    CHECK_THROWS_AS(solve_indefinite(sparse(a), Vector::Ones(3)), SingularMatrixError);
  }

  TEST_CASE("bordered matrix layout") {
    SparseMatrix id(3, 3);
    id.setIdentity();
    const Eigen::MatrixXd b = testing::dense(bordered(id, Vector::Constant(3, 2.0)));
    CHECK(b.rows() == 4);
    CHECK(b(3, 0) == 2.0);
    CHECK(b(0, 3) == 2.0);
    CHECK(b(3, 3) == 0.0);
  }

  TEST_CASE("constrained Poisson") {
    const Discretization disc(build_crossed_mesh({}, 16));
    const Vector& c = disc.ones_mass();
    CHECK(solve_constrained_poisson(disc.stiffness(), c, Vector::Zero(c.size())).norm() == 0.0);

    // -Laplace u = cos(pi x), Neumann: u = cos(pi x) / pi^2
    const Vector b = assemble_load(*disc.scalar_space(), [](const Point& p) { return std::cos(M_PI * p.x); });
    const Vector u = solve_constrained_poisson(disc.stiffness(), c, b);
    CHECK(std::abs(c.dot(u)) < 1e-14);
    const FeFunction uf(disc.scalar_space(), u);
    CHECK(error_norm(uf, ScalarField{[](const Point& p) { return std::cos(M_PI * p.x) / (M_PI * M_PI); }, {}},
                     NormKind::L2) < 1e-3);

    CHECK_THROWS_AS(solve_constrained_poisson(disc.stiffness(), c, c), SolverError);

    std::mt19937 rng(4);
    Vector b1 = testing::random_vector(c.size(), rng), b2 = testing::random_vector(c.size(), rng);
    b1.array() -= b1.sum() / c.size();
    b2.array() -= b2.sum() / c.size();
    const ConstrainedPoissonSolver solver(disc.stiffness(), c);
    const Vector lin = solver.solve(2.0 * b1 - 3.0 * b2) - (2.0 * solver.solve(b1) - 3.0 * solver.solve(b2));
    CHECK(lin.norm() < 1e-10 * solver.solve(b1).norm());
    CHECK(c.dot(solver.solve(b1, 0.25)) == doctest::Approx(0.25).epsilon(1e-12));
  }

  TEST_CASE("LU factorization reuse") {
    const Discretization disc(build_crossed_mesh({}, 4));
    LuFactorization lu;
    CHECK_FALSE(lu.ready());
    SparseMatrix a = disc.mass();
    lu.factorize(a);
    CHECK(lu.rows() == a.rows());
    const Vector x1 = lu.solve(disc.ones_mass());
    a = 2.0 * disc.mass();
    lu.factorize(a);
    const Vector x2 = lu.solve(disc.ones_mass());
    CHECK((x1 - 2.0 * x2).norm() < 1e-12);
  }
}
