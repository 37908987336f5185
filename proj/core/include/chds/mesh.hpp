#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

namespace chds {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rectangle {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Conforming triangulation of a rectangle.
///
/// Vertices are numbered lexicographically by (y, x). Triangles are counterclockwise.
/// Local edge k of a triangle joins its local vertices k and (k + 1) % 3. Edges are stored
/// with their endpoints in increasing order and sorted, so edge numbering is reproducible.
///
/// Meshes produced by uniform_refine() keep a link to their parent and, per triangle, the
/// index of the parent triangle it was cut from; prolongation between nested levels relies
/// on this.
class Mesh {
 public:
  /// Builds the connectivity tables and validates the invariants. Throws chds::Error
  /// (ErrorKind::Mesh) on inverted triangles, non-conforming edges or a triangle with more
  /// than one boundary edge.
  Mesh(Rectangle domain, std::vector<Point> vertices, std::vector<Triangle> triangles,
       std::shared_ptr<const Mesh> parent = nullptr, std::vector<int> parent_triangle = {});

  const Rectangle& domain() const { return domain_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
  const std::vector<int>& boundary_vertices() const { return boundary_vertices_; }
  const std::vector<bool>& boundary_edge_flags() const { return boundary_edge_; }
  bool is_boundary_vertex(int v) const { return vertex_on_boundary_[v]; }

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Longest edge over all triangles.
  double h() const { return h_; }
  /// Refinement depth relative to the coarsest mesh in the chain.
  int level() const { return level_; }
  const std::shared_ptr<const Mesh>& parent() const { return parent_; }
  /// Parent triangle of each triangle; empty for a root mesh.
  const std::vector<int>& parent_triangle() const { return parent_triangle_; }

  double signed_area(int t) const;
  Point edge_midpoint(int e) const;

 private:
  Rectangle domain_;
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<bool> boundary_edge_;
  std::vector<bool> vertex_on_boundary_;
  std::vector<int> boundary_vertices_;
  std::shared_ptr<const Mesh> parent_;
  std::vector<int> parent_triangle_;
  int level_ = 0;
  double h_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Union-jack triangulation: each of the n x n cells is cut by both diagonals into four right
/// isosceles triangles meeting at the cell center. 4n^2 triangles, (n+1)^2 + n^2 vertices.
MeshPtr build_crossed_mesh(const Rectangle& domain, int n);

/// Quadrisection through edge midpoints. The child keeps every parent vertex, h halves.
MeshPtr uniform_refine(const MeshPtr& mesh);

/// Walks the parent chain of `fine` looking for `coarse` (pointer identity).
bool is_ancestor(const Mesh& coarse, const Mesh& fine);

struct MeshReport {
  bool positive_orientation = true;
  bool conforming = true;
  bool at_most_one_boundary_edge = true;
  int max_boundary_edges_per_triangle = 0;
};

/// Re-checks the structural invariants from scratch (used by tests and mesh-info).
MeshReport inspect(const Mesh& mesh);

/// VTK legacy ASCII, unstructured grid of triangles (cell type 5).
void write_vtk(const Mesh& mesh, std::ostream& out);

}  // namespace chds
