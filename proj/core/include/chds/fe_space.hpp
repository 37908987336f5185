#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "chds/mesh.hpp"

namespace chds {

using Vector = Eigen::VectorXd;

enum class Family { P1, P2, P2Vector };

std::string_view to_string(Family family);

/// Symmetric 7-point rule on triangles, exact for polynomials of degree 5.
/// Barycentric coordinates and weights normalized to sum to one (multiply by the area).
struct Quadrature {
  static constexpr int size = 7;
  std::array<std::array<double, 3>, size> barycentric;
  std::array<double, size> weight;
};
const Quadrature& triangle_quadrature();

/// Affine map data for one triangle.
struct TriangleGeometry {
  std::array<Point, 3> vertex;
  double area = 0.0;
  std::array<std::array<double, 2>, 3> grad_barycentric;  // constant per triangle

  Point map(const std::array<double, 3>& lambda) const;
  std::array<double, 3> barycentric(const Point& p) const;
};
TriangleGeometry triangle_geometry(const Mesh& mesh, int t);

/// Scalar Lagrange basis on a triangle, given in barycentric coordinates.
/// P2 ordering: three vertex functions, then edge functions for local edges (0,1), (1,2), (2,0).
int scalar_basis_size(Family family);
void scalar_basis_values(Family family, const std::array<double, 3>& lambda, std::span<double> values);
void scalar_basis_gradients(Family family, const std::array<double, 3>& lambda, const TriangleGeometry& geo,
                            std::span<std::array<double, 2>> grads);

/// Degree-of-freedom map for a continuous Lagrange space.
///
/// Scalar dofs: vertices first, then (P2) one per edge. The vector space stores component c of
/// scalar dof i at index c * scalar_dof_count() + i. boundary_dofs() is populated only for the
/// vector (velocity) space, where the homogeneous Dirichlet condition lives.
class FeSpace {
 public:
  FeSpace(MeshPtr mesh, Family family, bool mean_zero = false);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  Family family() const { return family_; }
  Family scalar_family() const { return family_ == Family::P1 ? Family::P1 : Family::P2; }
  bool mean_zero() const { return mean_zero_; }
  int components() const { return family_ == Family::P2Vector ? 2 : 1; }
  int scalar_dof_count() const { return scalar_dofs_; }
  int dof_count() const { return components() * scalar_dofs_; }
  int scalar_dofs_per_cell() const { return scalar_basis_size(scalar_family()); }

  /// Scalar dof indices of triangle t (length scalar_dofs_per_cell()).
  std::span<const int> cell_dofs(int t) const {
    const int k = scalar_dofs_per_cell();
    return {cell_dofs_.data() + static_cast<std::size_t>(t) * k, static_cast<std::size_t>(k)};
  }
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  /// Interior dofs of the vector space (all dofs for scalar spaces).
  const std::vector<int>& free_dofs() const { return free_dofs_; }
  /// Location of scalar dof i (vertex or edge midpoint).
  const Point& node(int i) const { return nodes_[i]; }

 private:
  MeshPtr mesh_;
  Family family_;
  bool mean_zero_;
  int scalar_dofs_ = 0;
  std::vector<int> cell_dofs_;
  std::vector<int> boundary_dofs_;
  std::vector<int> free_dofs_;
  std::vector<Point> nodes_;
};

using SpacePtr = std::shared_ptr<const FeSpace>;

struct FeFunction {
  SpacePtr space;
  Vector coefficients;

  FeFunction() = default;
  explicit FeFunction(SpacePtr s);
  FeFunction(SpacePtr s, Vector c);

  const FeSpace& fe_space() const { return *space; }
  int size() const { return static_cast<int>(coefficients.size()); }
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<double, 4>;  // row-major: d(component i)/d(x_j) at index 2 * i + j

/// Scalar field with its gradient; the gradient may be left empty when only values are needed.
struct ScalarField {
  std::function<double(const Point&)> value;
  std::function<Vec2(const Point&)> gradient;
};

struct VectorField {
  std::function<Vec2(const Point&)> value;
  std::function<Mat2(const Point&)> jacobian;
};

ScalarField constant_field(double c);

/// Nodal interpolation I_h.
FeFunction interpolate(const SpacePtr& space, const std::function<double(const Point&)>& f);
FeFunction interpolate(const SpacePtr& space, const std::function<Vec2(const Point&)>& f);

/// Value / gradient of component `component` of f on triangle t at barycentric point lambda.
double evaluate(const FeFunction& f, int t, const std::array<double, 3>& lambda, int component = 0);
Vec2 evaluate_gradient(const FeFunction& f, int t, const std::array<double, 3>& lambda, int component = 0);

}  // namespace chds
