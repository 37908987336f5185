#include "chds/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "chds/error.hpp"

namespace chds {
namespace {

[[noreturn]] void mesh_error(const std::string& what) { throw Error(ErrorKind::Mesh, what); }

bool on_side(const Rectangle& d, const Point& p, double tol, int side) {
  switch (side) {
    case 0: return std::abs(p.y - d.y0) <= tol;
    case 1: return std::abs(p.x - d.x1) <= tol;
    case 2: return std::abs(p.y - d.y1) <= tol;
    default: return std::abs(p.x - d.x0) <= tol;
  }
}

bool segment_on_boundary(const Rectangle& d, const Point& a, const Point& b, double tol) {
  for (int side = 0; side < 4; ++side) {
    if (on_side(d, a, tol, side) && on_side(d, b, tol, side)) return true;
  }
  return false;
}

}  // namespace

Mesh::Mesh(Rectangle domain, std::vector<Point> vertices, std::vector<Triangle> triangles,
           std::shared_ptr<const Mesh> parent, std::vector<int> parent_triangle)
    : domain_(domain), parent_(std::move(parent)), parent_triangle_(std::move(parent_triangle)) {
  if (!(domain_.width() > 0.0) || !(domain_.height() > 0.0)) mesh_error("degenerate rectangle");
  if (vertices.empty() || triangles.empty()) mesh_error("empty mesh");
  if (parent_ && parent_triangle_.size() != triangles.size())
    mesh_error("parent_triangle must have one entry per triangle");
  level_ = parent_ ? parent_->level() + 1 : 0;

  const int nv = static_cast<int>(vertices.size());
  const double tol = 1e-10 * std::max(domain_.width(), domain_.height());

  // Lexicographic (y, x) numbering.
  std::vector<int> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Point& pa = vertices[a];
    const Point& pb = vertices[b];
    if (std::abs(pa.y - pb.y) > tol) return pa.y < pb.y;
    return pa.x < pb.x;
  });
  std::vector<int> new_index(nv);
  vertices_.resize(nv);
  for (int i = 0; i < nv; ++i) {
    new_index[order[i]] = i;
    vertices_[i] = vertices[order[i]];
  }
  for (int i = 1; i < nv; ++i) {
    if (std::abs(vertices_[i].x - vertices_[i - 1].x) <= tol &&
        std::abs(vertices_[i].y - vertices_[i - 1].y) <= tol)
      mesh_error("duplicate vertex at (" + std::to_string(vertices_[i].x) + ", " +
                 std::to_string(vertices_[i].y) + ")");
  }
  triangles_ = std::move(triangles);
  for (auto& t : triangles_) {
    for (int& v : t) {
      if (v < 0 || v >= nv) mesh_error("triangle references a missing vertex");
      v = new_index[v];
    }
  }

  const int nt = triangle_count();
  for (int t = 0; t < nt; ++t) {
    if (!(signed_area(t) > 0.0)) mesh_error("triangle " + std::to_string(t) + " is not counterclockwise");
  }

  // Edge table: sort (min, max, triangle, local edge) records and merge.
  struct Record {
    int a, b, tri, local;
  };
  std::vector<Record> records;
  records.reserve(3 * nt);
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      int a = triangles_[t][k];
      int b = triangles_[t][(k + 1) % 3];
      if (a > b) std::swap(a, b);
      records.push_back({a, b, t, k});
    }
  }
  std::sort(records.begin(), records.end(), [](const Record& l, const Record& r) {
    return l.a != r.a ? l.a < r.a : (l.b != r.b ? l.b < r.b : l.tri < r.tri);
  });
  triangle_edges_.assign(nt, {-1, -1, -1});
  std::vector<int> boundary_count(nt, 0);
  vertex_on_boundary_.assign(nv, false);
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    while (j < records.size() && records[j].a == records[i].a && records[j].b == records[i].b) ++j;
    const int shared = static_cast<int>(j - i);
    if (shared > 2) mesh_error("edge shared by more than two triangles");
    const int e = edge_count();
    edges_.push_back({records[i].a, records[i].b});
    const bool boundary = shared == 1;
    boundary_edge_.push_back(boundary);
    if (boundary) {
      if (!segment_on_boundary(domain_, vertices_[records[i].a], vertices_[records[i].b], tol))
        mesh_error("non-conforming edge (hanging node) inside the domain");
      vertex_on_boundary_[records[i].a] = true;
      vertex_on_boundary_[records[i].b] = true;
      ++boundary_count[records[i].tri];
    }
    for (std::size_t k = i; k < j; ++k) triangle_edges_[records[k].tri][records[k].local] = e;
    i = j;
  }
  for (int t = 0; t < nt; ++t) {
    if (boundary_count[t] > 1)
      mesh_error("triangle " + std::to_string(t) + " has more than one boundary edge");
  }
  for (int v = 0; v < nv; ++v) {
    if (vertex_on_boundary_[v]) boundary_vertices_.push_back(v);
  }
  for (const Edge& e : edges_) {
    const Point& a = vertices_[e[0]];
    const Point& b = vertices_[e[1]];
    h_ = std::max(h_, std::hypot(a.x - b.x, a.y - b.y));
  }
}

double Mesh::signed_area(int t) const {
  const Point& a = vertices_[triangles_[t][0]];
  const Point& b = vertices_[triangles_[t][1]];
  const Point& c = vertices_[triangles_[t][2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point Mesh::edge_midpoint(int e) const {
  const Point& a = vertices_[edges_[e][0]];
  const Point& b = vertices_[edges_[e][1]];
  return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
}

MeshPtr build_crossed_mesh(const Rectangle& domain, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "build_crossed_mesh: n must be >= 1");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "build_crossed_mesh: degenerate rectangle");
  const double dx = domain.width() / n;
  const double dy = domain.height() / n;
  std::vector<Point> vertices;
  vertices.reserve((n + 1) * (n + 1) + n * n);
  auto corner = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) vertices.push_back({domain.x0 + i * dx, domain.y0 + j * dy});
  const int first_center = static_cast<int>(vertices.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      vertices.push_back({domain.x0 + (i + 0.5) * dx, domain.y0 + (j + 0.5) * dy});
  std::vector<Triangle> triangles;
  triangles.reserve(4 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int c = first_center + j * n + i;
      const int sw = corner(i, j), se = corner(i + 1, j);
      const int ne = corner(i + 1, j + 1), nw = corner(i, j + 1);
      triangles.push_back({sw, se, c});
      triangles.push_back({se, ne, c});
      triangles.push_back({ne, nw, c});
      triangles.push_back({nw, sw, c});
    }
  }
  return std::make_shared<const Mesh>(domain, std::move(vertices), std::move(triangles));
}

MeshPtr uniform_refine(const MeshPtr& mesh) {
  if (!mesh) throw Error(ErrorKind::InvalidArgument, "uniform_refine: null mesh");
  const int nv = mesh->vertex_count();
  std::vector<Point> vertices = mesh->vertices();
  vertices.reserve(nv + mesh->edge_count());
  for (int e = 0; e < mesh->edge_count(); ++e) vertices.push_back(mesh->edge_midpoint(e));

  std::vector<Triangle> triangles;
  std::vector<int> parent_triangle;
  triangles.reserve(4 * mesh->triangle_count());
  parent_triangle.reserve(4 * mesh->triangle_count());
  for (int t = 0; t < mesh->triangle_count(); ++t) {
    const Triangle& v = mesh->triangles()[t];
    const auto& te = mesh->triangle_edges()[t];
    const int m01 = nv + te[0], m12 = nv + te[1], m20 = nv + te[2];
    for (const Triangle& child : {Triangle{v[0], m01, m20}, Triangle{m01, v[1], m12},
                                  Triangle{m20, m12, v[2]}, Triangle{m01, m12, m20}}) {
      triangles.push_back(child);
      parent_triangle.push_back(t);
    }
  }
  return std::make_shared<const Mesh>(mesh->domain(), std::move(vertices), std::move(triangles), mesh,
                                      std::move(parent_triangle));
}

bool is_ancestor(const Mesh& coarse, const Mesh& fine) {
  for (const Mesh* m = &fine; m != nullptr; m = m->parent().get()) {
    if (m == &coarse) return true;
  }
  return false;
}

MeshReport inspect(const Mesh& mesh) {
  MeshReport report;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (!(mesh.signed_area(t) > 0.0)) report.positive_orientation = false;
  }
  std::vector<int> uses(mesh.edge_count(), 0);
  for (const auto& te : mesh.triangle_edges())
    for (int e : te) ++uses[e];
  const double tol = 1e-10 * std::max(mesh.domain().width(), mesh.domain().height());
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const Point& a = mesh.vertices()[mesh.edges()[e][0]];
    const Point& b = mesh.vertices()[mesh.edges()[e][1]];
    const bool boundary = segment_on_boundary(mesh.domain(), a, b, tol);
    if (uses[e] > 2 || (uses[e] == 1 && !boundary) || (uses[e] == 2 && boundary))
      report.conforming = false;
  }
  for (const auto& te : mesh.triangle_edges()) {
    int count = 0;
    for (int e : te) count += uses[e] == 1 ? 1 : 0;
    report.max_boundary_edges_per_triangle = std::max(report.max_boundary_edges_per_triangle, count);
  }
  report.at_most_one_boundary_edge = report.max_boundary_edges_per_triangle <= 1;
  return report;
}

void write_vtk(const Mesh& mesh, std::ostream& out) {
  out << "# vtk DataFile Version 3.0\n";
  out << "chds mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out.precision(17);
  out << "POINTS " << mesh.vertex_count() << " double\n";
  for (const Point& p : mesh.vertices()) out << p.x << ' ' << p.y << " 0\n";
  out << "CELLS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count() << '\n';
  for (const Triangle& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.triangle_count() << '\n';
  for (int t = 0; t < mesh.triangle_count(); ++t) out << "5\n";
}

}  // namespace chds
