#include "chds/fe_space.hpp"

#include <algorithm>
#include <cmath>

#include "chds/error.hpp"

namespace chds {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::P1: return "P1";
    case Family::P2: return "P2";
    case Family::P2Vector: return "P2-vector";
  }
  return "?";
}

const Quadrature& triangle_quadrature() {
  static const Quadrature rule = [] {
    Quadrature q{};
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
    const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
    q.barycentric[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    q.weight[0] = 9.0 / 40.0;
    q.barycentric[1] = {1.0 - 2.0 * a1, a1, a1};
    q.barycentric[2] = {a1, 1.0 - 2.0 * a1, a1};
    q.barycentric[3] = {a1, a1, 1.0 - 2.0 * a1};
    q.barycentric[4] = {1.0 - 2.0 * a2, a2, a2};
    q.barycentric[5] = {a2, 1.0 - 2.0 * a2, a2};
    q.barycentric[6] = {a2, a2, 1.0 - 2.0 * a2};
    for (int i = 1; i <= 3; ++i) q.weight[i] = w1;
    for (int i = 4; i <= 6; ++i) q.weight[i] = w2;
    return q;
  }();
  return rule;
}

Point TriangleGeometry::map(const std::array<double, 3>& l) const {
  return {l[0] * vertex[0].x + l[1] * vertex[1].x + l[2] * vertex[2].x,
          l[0] * vertex[0].y + l[1] * vertex[1].y + l[2] * vertex[2].y};
}

std::array<double, 3> TriangleGeometry::barycentric(const Point& p) const {
  std::array<double, 3> l{};
  for (int i = 1; i < 3; ++i) {
    l[i] = grad_barycentric[i][0] * (p.x - vertex[0].x) + grad_barycentric[i][1] * (p.y - vertex[0].y);
  }
  l[0] = 1.0 - l[1] - l[2];
  return l;
}

TriangleGeometry triangle_geometry(const Mesh& mesh, int t) {
  TriangleGeometry g;
  const Triangle& tri = mesh.triangles()[t];
  for (int i = 0; i < 3; ++i) g.vertex[i] = mesh.vertices()[tri[i]];
  const double twice_area = (g.vertex[1].x - g.vertex[0].x) * (g.vertex[2].y - g.vertex[0].y) -
                            (g.vertex[2].x - g.vertex[0].x) * (g.vertex[1].y - g.vertex[0].y);
  g.area = 0.5 * twice_area;
  // grad lambda_i = rot90(opposite edge) / (2A)
  for (int i = 0; i < 3; ++i) {
    const Point& a = g.vertex[(i + 1) % 3];
    const Point& b = g.vertex[(i + 2) % 3];
    g.grad_barycentric[i] = {(a.y - b.y) / twice_area, (b.x - a.x) / twice_area};
  }
  return g;
}

int scalar_basis_size(Family family) { return family == Family::P1 ? 3 : 6; }

void scalar_basis_values(Family family, const std::array<double, 3>& l, std::span<double> values) {
  if (family == Family::P1) {
    values[0] = l[0];
    values[1] = l[1];
    values[2] = l[2];
    return;
  }
  for (int i = 0; i < 3; ++i) values[i] = l[i] * (2.0 * l[i] - 1.0);
  for (int k = 0; k < 3; ++k) values[3 + k] = 4.0 * l[k] * l[(k + 1) % 3];
}

void scalar_basis_gradients(Family family, const std::array<double, 3>& l, const TriangleGeometry& geo,
                            std::span<std::array<double, 2>> grads) {
  const auto& g = geo.grad_barycentric;
  if (family == Family::P1) {
    for (int i = 0; i < 3; ++i) grads[i] = g[i];
    return;
  }
  for (int i = 0; i < 3; ++i) {
    const double s = 4.0 * l[i] - 1.0;
    grads[i] = {s * g[i][0], s * g[i][1]};
  }
  for (int k = 0; k < 3; ++k) {
    const int a = k, b = (k + 1) % 3;
    grads[3 + k] = {4.0 * (l[a] * g[b][0] + l[b] * g[a][0]), 4.0 * (l[a] * g[b][1] + l[b] * g[a][1])};
  }
}

FeSpace::FeSpace(MeshPtr mesh, Family family, bool mean_zero)
    : mesh_(std::move(mesh)), family_(family), mean_zero_(mean_zero) {
  if (!mesh_) throw Error(ErrorKind::InvalidArgument, "FeSpace: null mesh");
  if (mean_zero_ && family_ == Family::P2Vector)
    throw Error(ErrorKind::InvalidArgument, "FeSpace: the vector space cannot carry a mean-zero constraint");
  const Mesh& m = *mesh_;
  const int nv = m.vertex_count();
  const int k = scalar_dofs_per_cell();
  scalar_dofs_ = family_ == Family::P1 ? nv : nv + m.edge_count();
  cell_dofs_.resize(static_cast<std::size_t>(m.triangle_count()) * k);
  for (int t = 0; t < m.triangle_count(); ++t) {
    int* d = cell_dofs_.data() + static_cast<std::size_t>(t) * k;
    for (int i = 0; i < 3; ++i) d[i] = m.triangles()[t][i];
    if (k == 6)
      for (int e = 0; e < 3; ++e) d[3 + e] = nv + m.triangle_edges()[t][e];
  }
  nodes_ = m.vertices();
  if (family_ != Family::P1)
    for (int e = 0; e < m.edge_count(); ++e) nodes_.push_back(m.edge_midpoint(e));

  if (family_ == Family::P2Vector) {
    std::vector<bool> on_boundary(scalar_dofs_, false);
    for (int v : m.boundary_vertices()) on_boundary[v] = true;
    for (int e = 0; e < m.edge_count(); ++e)
      if (m.boundary_edge_flags()[e]) on_boundary[nv + e] = true;
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < scalar_dofs_; ++i) {
        (on_boundary[i] ? boundary_dofs_ : free_dofs_).push_back(c * scalar_dofs_ + i);
      }
  } else {
    free_dofs_.resize(scalar_dofs_);
    for (int i = 0; i < scalar_dofs_; ++i) free_dofs_[i] = i;
  }
}

FeFunction::FeFunction(SpacePtr s) : space(std::move(s)), coefficients(Vector::Zero(space->dof_count())) {}

FeFunction::FeFunction(SpacePtr s, Vector c) : space(std::move(s)), coefficients(std::move(c)) {
  if (coefficients.size() != space->dof_count())
    throw Error(ErrorKind::InvalidArgument, "FeFunction: coefficient length does not match the space");
}

ScalarField constant_field(double c) {
  return {[c](const Point&) { return c; }, [](const Point&) { return Vec2{0.0, 0.0}; }};
}

FeFunction interpolate(const SpacePtr& space, const std::function<double(const Point&)>& f) {
  if (space->components() != 1) throw Error(ErrorKind::InvalidArgument, "interpolate: scalar field on vector space");
  FeFunction out(space);
  for (int i = 0; i < space->scalar_dof_count(); ++i) out.coefficients[i] = f(space->node(i));
  return out;
}

FeFunction interpolate(const SpacePtr& space, const std::function<Vec2(const Point&)>& f) {
  if (space->components() != 2) throw Error(ErrorKind::InvalidArgument, "interpolate: vector field on scalar space");
  FeFunction out(space);
  const int n = space->scalar_dof_count();
  for (int i = 0; i < n; ++i) {
    const Vec2 v = f(space->node(i));
    out.coefficients[i] = v[0];
    out.coefficients[n + i] = v[1];
  }
  for (int d : space->boundary_dofs()) out.coefficients[d] = 0.0;
  return out;
}

double evaluate(const FeFunction& f, int t, const std::array<double, 3>& lambda, int component) {
  const FeSpace& s = *f.space;
  std::array<double, 6> phi{};
  scalar_basis_values(s.scalar_family(), lambda, phi);
  const auto dofs = s.cell_dofs(t);
  const int offset = component * s.scalar_dof_count();
  double v = 0.0;
  for (std::size_t i = 0; i < dofs.size(); ++i) v += phi[i] * f.coefficients[offset + dofs[i]];
  return v;
}

Vec2 evaluate_gradient(const FeFunction& f, int t, const std::array<double, 3>& lambda, int component) {
  const FeSpace& s = *f.space;
  const TriangleGeometry geo = triangle_geometry(s.mesh(), t);
  std::array<std::array<double, 2>, 6> g{};
  scalar_basis_gradients(s.scalar_family(), lambda, geo, g);
  const auto dofs = s.cell_dofs(t);
  const int offset = component * s.scalar_dof_count();
  Vec2 out{0.0, 0.0};
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const double c = f.coefficients[offset + dofs[i]];
    out[0] += g[i][0] * c;
    out[1] += g[i][1] * c;
  }
  return out;
}

}  // namespace chds
