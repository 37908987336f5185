#include <doctest.h>

#include <cmath>

#include "chds/assembly.hpp"
#include "chds/discretization.hpp"
#include "chds/error.hpp"
#include "support.hpp"

using namespace chds;

namespace {

SpacePtr space(int n, Family f, Rectangle d = {}) { return std::make_shared<const FeSpace>(build_crossed_mesh(d, n), f); }

}  // namespace

TEST_SUITE("fem") {
  TEST_CASE("dof counts") {
    const MeshPtr m = build_crossed_mesh({}, 4);
    const FeSpace p1(m, Family::P1), p2(m, Family::P2), v(m, Family::P2Vector);
    CHECK(p1.dof_count() == m->vertex_count());
    CHECK(p2.dof_count() == m->vertex_count() + m->edge_count());
    CHECK(v.dof_count() == 2 * p2.dof_count());
    CHECK(p1.boundary_dofs().empty());
    CHECK(v.free_dofs().size() + v.boundary_dofs().size() == static_cast<std::size_t>(v.dof_count()));
    for (int d : v.boundary_dofs()) {
      const Point& p = v.node(d % v.scalar_dof_count());
      CHECK((p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0));
    }
  }

  TEST_CASE("basis functions form a partition of unity") {
    std::array<double, 6> vals{};
    for (Family f : {Family::P1, Family::P2}) {
      const int k = scalar_basis_size(f);
      for (const auto& lam : triangle_quadrature().barycentric) {
        scalar_basis_values(f, lam, std::span<double>(vals.data(), k));
        double s = 0;
        for (int i = 0; i < k; ++i) s += vals[i];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("7-point rule integrates degree 5 exactly") {
    const auto& q = triangle_quadrature();
    const auto oracle = testing::duffy_rule(10);
    auto f = [](const std::array<double, 3>& l) { return std::pow(l[0], 3) * l[1] * l[1] + l[2] * l[2] * l[1] - 0.3 * l[0]; };
    double a = 0, b = 0;
    for (int i = 0; i < Quadrature::size; ++i) a += q.weight[i] * f(q.barycentric[i]);
    for (const auto& [l, w] : oracle) b += w * f(l);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
  }

  TEST_CASE("mass rows sum to the basis integrals and stiffness annihilates constants") {
    const auto s = space(4, Family::P1, {0.0, 2.0, -1.0, 1.0});
    const SparseMatrix m = assemble_matrix(MatrixForm::mass(), *s, *s);
    const SparseMatrix k = assemble_matrix(MatrixForm::stiffness(), *s, *s);
    const Vector ones = Vector::Ones(s->dof_count());
    CHECK(ones.dot(m * ones) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK((k * ones).lpNorm<Eigen::Infinity>() < 1e-13);
    CHECK((testing::dense(m) - testing::dense(m).transpose()).norm() < 1e-15);
    CHECK((testing::dense(k) - testing::dense(k).transpose()).norm() < 1e-13);
  }

  TEST_CASE("P2 mass and stiffness reproduce quadratic integrals") {
    const auto s = space(3, Family::P2);
    const FeFunction f = interpolate(s, [](const Point& p) { return p.x * p.x + p.y; });
    const SparseMatrix m = assemble_matrix(MatrixForm::mass(), *s, *s);
    const SparseMatrix k = assemble_matrix(MatrixForm::stiffness(), *s, *s);
    // integral of (x^2 + y)^2 = 1/5 + 2/6 + 1/3; of |grad|^2 = 4/3 + 1
    CHECK(f.coefficients.dot(m * f.coefficients) == doctest::Approx(0.2 + 1.0 / 3 + 1.0 / 3).epsilon(1e-13));
    CHECK(f.coefficients.dot(k * f.coefficients) == doctest::Approx(4.0 / 3 + 1.0).epsilon(1e-13));
  }

  TEST_CASE("divergence of any velocity integrates to zero") {
    const Discretization disc(build_crossed_mesh({}, 4));
    std::mt19937 rng(3);
    Vector u = testing::random_vector(disc.velocity_space()->dof_count(), rng);
    for (int d : disc.velocity_space()->boundary_dofs()) u[d] = 0.0;
    const Vector ones = Vector::Ones(disc.scalar_space()->dof_count());
    CHECK(std::abs(ones.dot(disc.divergence() * u)) < 1e-13);
  }

  TEST_CASE("convection with constant phi vanishes") {
    const Discretization disc(build_crossed_mesh({}, 3));
    const FeFunction phi(disc.scalar_space(), Vector::Constant(disc.scalar_space()->dof_count(), 0.7));
    const SparseMatrix g = assemble_matrix(MatrixForm::convection(phi), *disc.velocity_space(), *disc.scalar_space());
    CHECK(testing::dense(g).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("convection of a divergence-free field conserves mass") {
    const Discretization disc(build_crossed_mesh({}, 4));
    std::mt19937 rng(11);
    const FeFunction phi(disc.scalar_space(), testing::random_vector(disc.scalar_space()->dof_count(), rng));
    // discretely divergence-free u from a Stokes solve with random forcing
    const DarcyStokesSolver flow(disc, 1.0, 1.0);
    const auto [u, p] = flow.solve(testing::random_vector(disc.velocity_space()->dof_count(), rng));
    CHECK((disc.divergence() * u).lpNorm<Eigen::Infinity>() < 1e-12);
    const SparseMatrix g = assemble_matrix(MatrixForm::convection(phi), *disc.velocity_space(), *disc.scalar_space());
    const Vector ones = Vector::Ones(disc.scalar_space()->dof_count());
    CHECK(std::abs(ones.dot(g * u)) < 1e-12);
  }

  TEST_CASE("cubic load against an independent quadrature") {
    const auto s = space(4, Family::P1);
    const int n = s->dof_count();
    const Vector ones = Vector::Ones(n);
    CHECK(assemble_vector(VectorFormKind::Cubic, FeFunction(s, Vector::Ones(n)), *s).sum() ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(assemble_vector(VectorFormKind::Cubic, FeFunction(s, Vector::Zero(n)), *s).lpNorm<Eigen::Infinity>() == 0.0);
    const FeFunction x = interpolate(s, [](const Point& p) { return p.x; });
    const Vector cubic = assemble_vector(VectorFormKind::Cubic, x, *s);
    CHECK(cubic.sum() == doctest::Approx(0.25).epsilon(1e-14));
    std::mt19937 rng(5);
    const Vector r = testing::random_vector(n, rng);
    const FeFunction rf(s, r);
    const double lib = assemble_vector(VectorFormKind::Cubic, rf, *s).dot(r);
    const double ref = testing::integrate_p1_oracle(s->mesh(), r, [](double v) { return v * v * v * v; });
    CHECK(lib == doctest::Approx(ref).epsilon(1e-13));
  }

  TEST_CASE("cubic Jacobian is the derivative of the cubic load") {
    const auto s = space(3, Family::P1);
    std::mt19937 rng(9);
    const Vector r = testing::random_vector(s->dof_count(), rng);
    const Vector d = testing::random_vector(s->dof_count(), rng);
    const FeFunction f(s, r);
    const SparseMatrix j = assemble_matrix(MatrixForm::cubic_jacobian(f), *s, *s);
    const double h = 1e-6;
    const Vector fd = (assemble_vector(VectorFormKind::Cubic, FeFunction(s, r + h * d), *s) -
                       assemble_vector(VectorFormKind::Cubic, FeFunction(s, r - h * d), *s)) /
                      (2 * h);
    CHECK((fd - j * d).norm() < 1e-8 * (j * d).norm());
  }

  TEST_CASE("norms") {
    const auto s = space(2, Family::P1, {0.0, 2.0, 0.0, 1.0});
    const FeFunction c(s, Vector::Constant(s->dof_count(), std::sqrt(2.0)));
    CHECK(fe_norm(c, NormKind::L2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fe_norm(c, NormKind::H1Semi) < 1e-14);
    CHECK(fe_norm(c, NormKind::LinfNodal) == doctest::Approx(std::sqrt(2.0)));
    CHECK(integrate(c) == doctest::Approx(2.0 * std::sqrt(2.0)));
    const auto fine = space(64, Family::P2);
    const FeFunction ss = interpolate(fine, [](const Point& p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); });
    CHECK(fe_norm(ss, NormKind::L2) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fe_norm(ss, NormKind::H1Semi) == doctest::Approx(M_PI / std::sqrt(2.0)).epsilon(1e-5));
  }

  TEST_CASE("interpolation error rates") {
    std::vector<double> hs, e1, e2;
    const ScalarField f{[](const Point& p) { return std::sin(M_PI * p.x) * std::cos(M_PI * p.y); },
                        [](const Point& p) {
                          return Vec2{M_PI * std::cos(M_PI * p.x) * std::cos(M_PI * p.y),
                                      -M_PI * std::sin(M_PI * p.x) * std::sin(M_PI * p.y)};
                        }};
    for (int n : {4, 8, 16}) {
      const auto s1 = space(n, Family::P1), s2 = space(n, Family::P2);
      hs.push_back(s1->mesh().h());
      e1.push_back(error_norm(interpolate(s1, f.value), f, NormKind::L2));
      e2.push_back(error_norm(interpolate(s2, f.value), f, NormKind::H1));
    }
    CHECK(testing::fitted_rate(hs, e1) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(testing::fitted_rate(hs, e2) == doctest::Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("invalid arguments") {
    const auto s1 = space(2, Family::P1);
    const auto s2 = space(2, Family::P2);
    CHECK_THROWS_AS(FeFunction(s1, Vector::Zero(3)), Error);
    CHECK_THROWS_AS(assemble_matrix(MatrixForm::divergence(), *s1, *s1), Error);
    CHECK_THROWS_AS(assemble_matrix(MatrixForm{FormKind::Convection, nullptr}, *s2, *s1), Error);
  }
}
