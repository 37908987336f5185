#include "chds/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "chds/error.hpp"

namespace chds {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct ReferenceTable {
  int size = 0;
  std::array<std::array<double, 6>, Quadrature::size> value{};
};

const ReferenceTable& reference(Family scalar_family) {
  static const auto make = [](Family f) {
    ReferenceTable t;
    t.size = scalar_basis_size(f);
    const Quadrature& q = triangle_quadrature();
    for (int k = 0; k < Quadrature::size; ++k) scalar_basis_values(f, q.barycentric[k], t.value[k]);
    return t;
  };
  static const ReferenceTable p1 = make(Family::P1);
  static const ReferenceTable p2 = make(Family::P2);
  return scalar_family == Family::P1 ? p1 : p2;
}

using Gradients = std::array<std::array<std::array<double, 2>, 6>, Quadrature::size>;

void cell_gradients(Family scalar_family, const TriangleGeometry& geo, Gradients& out) {
  const Quadrature& q = triangle_quadrature();
  for (int k = 0; k < Quadrature::size; ++k) scalar_basis_gradients(scalar_family, q.barycentric[k], geo, out[k]);
}

void require_same_mesh(const FeSpace& a, const FeSpace& b, const char* who) {
  if (&a.mesh() != &b.mesh()) throw Error(ErrorKind::InvalidArgument, std::string(who) + ": spaces live on different meshes");
}

void require_p1_coefficient(const FeFunction* phi, const FeSpace& test, const char* who) {
  if (phi == nullptr) throw Error(ErrorKind::InvalidArgument, std::string(who) + ": missing phi argument");
  if (phi->space->family() != Family::P1)
    throw Error(ErrorKind::InvalidArgument, std::string(who) + ": phi must live on a P1 space");
  require_same_mesh(*phi->space, test, who);
}

// Values of a P1 function at the quadrature points of triangle t.
std::array<double, Quadrature::size> p1_values(const FeFunction& f, int t) {
  const auto& ref = reference(Family::P1);
  const auto dofs = f.space->cell_dofs(t);
  std::array<double, Quadrature::size> v{};
  for (int k = 0; k < Quadrature::size; ++k)
    v[k] = ref.value[k][0] * f.coefficients[dofs[0]] + ref.value[k][1] * f.coefficients[dofs[1]] +
           ref.value[k][2] * f.coefficients[dofs[2]];
  return v;
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& trip) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

// Scalar mass / stiffness / cubic Jacobian with trial == test family.
SparseMatrix scalar_form(FormKind kind, const FeSpace& space, const FeFunction* phi) {
  const Mesh& mesh = space.mesh();
  const Family fam = space.scalar_family();
  const auto& ref = reference(fam);
  const Quadrature& q = triangle_quadrature();
  const int nb = ref.size;
  const int n = space.scalar_dof_count();
  const int comps = space.components();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(mesh.triangle_count()) * nb * nb * comps);
  Gradients grads;
  std::array<std::array<double, 6>, 6> local{};
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriangleGeometry geo = triangle_geometry(mesh, t);
    for (auto& row : local) row.fill(0.0);
    if (kind == FormKind::Stiffness) {
      cell_gradients(fam, geo, grads);
      for (int k = 0; k < Quadrature::size; ++k) {
        const double w = q.weight[k] * geo.area;
        for (int i = 0; i < nb; ++i)
          for (int j = 0; j < nb; ++j)
            local[i][j] += w * (grads[k][i][0] * grads[k][j][0] + grads[k][i][1] * grads[k][j][1]);
      }
    } else {
      std::array<double, Quadrature::size> coef;
      coef.fill(1.0);
      if (kind == FormKind::CubicJacobian) {
        const auto v = p1_values(*phi, t);
        for (int k = 0; k < Quadrature::size; ++k) coef[k] = 3.0 * v[k] * v[k];
      }
      for (int k = 0; k < Quadrature::size; ++k) {
        const double w = q.weight[k] * geo.area * coef[k];
        for (int i = 0; i < nb; ++i)
          for (int j = 0; j < nb; ++j) local[i][j] += w * ref.value[k][i] * ref.value[k][j];
      }
    }
    const auto dofs = space.cell_dofs(t);
    for (int c = 0; c < comps; ++c)
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) trip.emplace_back(c * n + dofs[i], c * n + dofs[j], local[i][j]);
  }
  return from_triplets(space.dof_count(), space.dof_count(), trip);
}

// Vector trial, scalar test: divergence or convection.
SparseMatrix mixed_form(FormKind kind, const FeSpace& trial, const FeSpace& test, const FeFunction* phi) {
  const Mesh& mesh = test.mesh();
  const auto& vref = reference(Family::P2);
  const auto& sref = reference(test.scalar_family());
  const Quadrature& q = triangle_quadrature();
  const int nv = vref.size, ns = sref.size;
  const int n = trial.scalar_dof_count();
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(mesh.triangle_count()) * ns * nv * 2);
  Gradients grads;
  std::array<std::array<std::array<double, 6>, 6>, 2> local{};
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriangleGeometry geo = triangle_geometry(mesh, t);
    for (auto& blk : local)
      for (auto& row : blk) row.fill(0.0);
    if (kind == FormKind::Divergence) {
      cell_gradients(Family::P2, geo, grads);
      for (int k = 0; k < Quadrature::size; ++k) {
        const double w = q.weight[k] * geo.area;
        for (int i = 0; i < ns; ++i)
          for (int j = 0; j < nv; ++j)
            for (int c = 0; c < 2; ++c) local[c][i][j] += w * sref.value[k][i] * grads[k][j][c];
      }
    } else {
      const Vec2 gphi = evaluate_gradient(*phi, t, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      for (int k = 0; k < Quadrature::size; ++k) {
        const double w = q.weight[k] * geo.area;
        for (int i = 0; i < ns; ++i)
          for (int j = 0; j < nv; ++j) {
            const double base = w * sref.value[k][i] * vref.value[k][j];
            local[0][i][j] += base * gphi[0];
            local[1][i][j] += base * gphi[1];
          }
      }
    }
    const auto tdofs = test.cell_dofs(t);
    const auto vdofs = trial.cell_dofs(t);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nv; ++j) trip.emplace_back(tdofs[i], c * n + vdofs[j], local[c][i][j]);
  }
  return from_triplets(test.dof_count(), trial.dof_count(), trip);
}

}  // namespace

SparseMatrix assemble_matrix(const MatrixForm& form, const FeSpace& trial, const FeSpace& test) {
  require_same_mesh(trial, test, "assemble_matrix");
  switch (form.kind) {
    case FormKind::VectorMass:
    case FormKind::VectorStiffness:
      if (trial.family() != Family::P2Vector || test.family() != Family::P2Vector)
        throw Error(ErrorKind::InvalidArgument, "assemble_matrix: vector forms need the P2-vector space");
      [[fallthrough]];
    case FormKind::Mass:
    case FormKind::Stiffness:
      if (&trial != &test && trial.family() != test.family())
        throw Error(ErrorKind::InvalidArgument, "assemble_matrix: mass/stiffness need matching spaces");
      return scalar_form(form.kind == FormKind::VectorMass ? FormKind::Mass
                         : form.kind == FormKind::VectorStiffness ? FormKind::Stiffness
                                                                   : form.kind,
                         trial, nullptr);
    case FormKind::CubicJacobian:
      require_p1_coefficient(form.phi, test, "assemble_matrix(cubic_jacobian)");
      if (trial.components() != 1 || trial.family() != test.family())
        throw Error(ErrorKind::InvalidArgument, "assemble_matrix(cubic_jacobian): scalar spaces required");
      return scalar_form(FormKind::CubicJacobian, trial, form.phi);
    case FormKind::Convection:
      require_p1_coefficient(form.phi, test, "assemble_matrix(convection)");
      [[fallthrough]];
    case FormKind::Divergence:
      if (trial.family() != Family::P2Vector || test.components() != 1)
        throw Error(ErrorKind::InvalidArgument, "assemble_matrix: expected vector trial and scalar test spaces");
      return mixed_form(form.kind, trial, test, form.phi);
  }
  throw Error(ErrorKind::InvalidArgument, "assemble_matrix: unknown form");
}

Vector assemble_vector(VectorFormKind kind, const FeFunction& coefficient, const FeSpace& test) {
  require_same_mesh(*coefficient.space, test, "assemble_vector");
  if (test.components() != 1 || coefficient.space->components() != 1)
    throw Error(ErrorKind::InvalidArgument, "assemble_vector: scalar spaces required");
  const Mesh& mesh = test.mesh();
  const auto& ref = reference(test.scalar_family());
  const Quadrature& q = triangle_quadrature();
  Vector out = Vector::Zero(test.dof_count());
  const bool p1_coef = coefficient.space->family() == Family::P1;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double area = mesh.signed_area(t);
    std::array<double, Quadrature::size> v;
    if (p1_coef) {
      v = p1_values(coefficient, t);
    } else {
      for (int k = 0; k < Quadrature::size; ++k) v[k] = evaluate(coefficient, t, q.barycentric[k]);
    }
    const auto dofs = test.cell_dofs(t);
    for (int k = 0; k < Quadrature::size; ++k) {
      const double g = kind == VectorFormKind::Cubic ? v[k] * v[k] * v[k] : v[k];
      const double w = q.weight[k] * area * g;
      for (int i = 0; i < ref.size; ++i) out[dofs[i]] += w * ref.value[k][i];
    }
  }
  return out;
}

Vector assemble_load(const FeSpace& test, const std::function<double(const Point&)>& f) {
  if (test.components() != 1) throw Error(ErrorKind::InvalidArgument, "assemble_load: scalar space required");
  const Mesh& mesh = test.mesh();
  const auto& ref = reference(test.scalar_family());
  const Quadrature& q = triangle_quadrature();
  Vector out = Vector::Zero(test.dof_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriangleGeometry geo = triangle_geometry(mesh, t);
    const auto dofs = test.cell_dofs(t);
    for (int k = 0; k < Quadrature::size; ++k) {
      const double w = q.weight[k] * geo.area * f(geo.map(q.barycentric[k]));
      for (int i = 0; i < ref.size; ++i) out[dofs[i]] += w * ref.value[k][i];
    }
  }
  return out;
}

Vector assemble_gradient_load(const FeSpace& test, const std::function<Vec2(const Point&)>& grad_f) {
  if (test.components() != 1)
    throw Error(ErrorKind::InvalidArgument, "assemble_gradient_load: scalar space required");
  const Mesh& mesh = test.mesh();
  const Family fam = test.scalar_family();
  const int nb = scalar_basis_size(fam);
  const Quadrature& q = triangle_quadrature();
  Vector out = Vector::Zero(test.dof_count());
  Gradients grads;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriangleGeometry geo = triangle_geometry(mesh, t);
    cell_gradients(fam, geo, grads);
    const auto dofs = test.cell_dofs(t);
    for (int k = 0; k < Quadrature::size; ++k) {
      const Vec2 g = grad_f(geo.map(q.barycentric[k]));
      const double w = q.weight[k] * geo.area;
      for (int i = 0; i < nb; ++i) out[dofs[i]] += w * (g[0] * grads[k][i][0] + g[1] * grads[k][i][1]);
    }
  }
  return out;
}

namespace {

// Accumulates squared L2 and H1-semi norms of (f - exact) over all components.
template <typename ExactValue, typename ExactGrad>
std::array<double, 2> squared_norms(const FeFunction& f, ExactValue&& exact_value, ExactGrad&& exact_grad,
                                    bool need_gradient) {
  const FeSpace& s = *f.space;
  const Mesh& mesh = s.mesh();
  const Family fam = s.scalar_family();
  const auto& ref = reference(fam);
  const Quadrature& q = triangle_quadrature();
  const int n = s.scalar_dof_count();
  double l2 = 0.0, h1 = 0.0;
  Gradients grads;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const TriangleGeometry geo = triangle_geometry(mesh, t);
    if (need_gradient) cell_gradients(fam, geo, grads);
    const auto dofs = s.cell_dofs(t);
    for (int k = 0; k < Quadrature::size; ++k) {
      const double w = q.weight[k] * geo.area;
      const Point x = geo.map(q.barycentric[k]);
      for (int c = 0; c < s.components(); ++c) {
        double v = 0.0;
        double gx = 0.0, gy = 0.0;
        for (int i = 0; i < ref.size; ++i) {
          const double coef = f.coefficients[c * n + dofs[i]];
          v += coef * ref.value[k][i];
          if (need_gradient) {
            gx += coef * grads[k][i][0];
            gy += coef * grads[k][i][1];
          }
        }
        const double e = v - exact_value(x, c);
        l2 += w * e * e;
        if (need_gradient) {
          const Vec2 ge = exact_grad(x, c);
          h1 += w * ((gx - ge[0]) * (gx - ge[0]) + (gy - ge[1]) * (gy - ge[1]));
        }
      }
    }
  }
  return {l2, h1};
}

double combine(const std::array<double, 2>& sq, NormKind kind) {
  switch (kind) {
    case NormKind::L2: return std::sqrt(sq[0]);
    case NormKind::H1Semi: return std::sqrt(sq[1]);
    case NormKind::H1: return std::sqrt(sq[0] + sq[1]);
    case NormKind::LinfNodal: break;
  }
  return 0.0;
}

}  // namespace

double fe_norm(const FeFunction& f, NormKind kind) {
  if (kind == NormKind::LinfNodal) return f.coefficients.size() ? f.coefficients.cwiseAbs().maxCoeff() : 0.0;
  const bool grad = kind != NormKind::L2;
  return combine(squared_norms(
                     f, [](const Point&, int) { return 0.0; }, [](const Point&, int) { return Vec2{0.0, 0.0}; }, grad),
                 kind);
}

double error_norm(const FeFunction& f, const ScalarField& exact, NormKind kind) {
  if (f.space->components() != 1) throw Error(ErrorKind::InvalidArgument, "error_norm: scalar function expected");
  if (kind == NormKind::LinfNodal) {
    double m = 0.0;
    for (int i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f.coefficients[i] - exact.value(f.space->node(i))));
    return m;
  }
  const bool grad = kind != NormKind::L2;
  if (grad && !exact.gradient) throw Error(ErrorKind::InvalidArgument, "error_norm: exact gradient required");
  return combine(squared_norms(
                     f, [&](const Point& x, int) { return exact.value(x); },
                     [&](const Point& x, int) { return exact.gradient(x); }, grad),
                 kind);
}

double error_norm(const FeFunction& f, const VectorField& exact, NormKind kind) {
  if (f.space->components() != 2) throw Error(ErrorKind::InvalidArgument, "error_norm: vector function expected");
  if (kind == NormKind::LinfNodal) {
    const int n = f.space->scalar_dof_count();
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec2 v = exact.value(f.space->node(i));
      m = std::max({m, std::abs(f.coefficients[i] - v[0]), std::abs(f.coefficients[n + i] - v[1])});
    }
    return m;
  }
  const bool grad = kind != NormKind::L2;
  if (grad && !exact.jacobian) throw Error(ErrorKind::InvalidArgument, "error_norm: exact jacobian required");
  return combine(squared_norms(
                     f, [&](const Point& x, int c) { return exact.value(x)[c]; },
                     [&](const Point& x, int c) {
                       const Mat2 j = exact.jacobian(x);
                       return Vec2{j[2 * c], j[2 * c + 1]};
                     },
                     grad),
                 kind);
}

double integrate(const FeFunction& f) {
  if (f.space->components() != 1) throw Error(ErrorKind::InvalidArgument, "integrate: scalar function expected");
  const Mesh& mesh = f.space->mesh();
  const auto& ref = reference(f.space->scalar_family());
  const Quadrature& q = triangle_quadrature();
  double s = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto dofs = f.space->cell_dofs(t);
    double cell = 0.0;
    for (int k = 0; k < Quadrature::size; ++k) {
      double v = 0.0;
      for (int i = 0; i < ref.size; ++i) v += ref.value[k][i] * f.coefficients[dofs[i]];
      cell += q.weight[k] * v;
    }
    s += cell * mesh.signed_area(t);
  }
  return s;
}

}  // namespace chds
