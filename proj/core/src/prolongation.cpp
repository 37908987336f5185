#include "chds/prolongation.hpp"

#include "chds/error.hpp"

namespace chds {

std::vector<int> ancestor_triangles(const Mesh& coarse, const Mesh& fine) {
  if (!is_ancestor(coarse, fine))
    throw Error(ErrorKind::InvalidArgument, "prolongate: fine mesh is not a refinement of the coarse mesh");
  std::vector<int> map(fine.triangle_count());
  for (int t = 0; t < fine.triangle_count(); ++t) map[t] = t;
  for (const Mesh* m = &fine; m != &coarse; m = m->parent().get()) {
    for (int& t : map) t = m->parent_triangle()[t];
  }
  return map;
}

FeFunction prolongate(const FeFunction& coarse, const SpacePtr& fine_space) {
  const FeSpace& cs = *coarse.space;
  const FeSpace& fs = *fine_space;
  if (cs.family() != fs.family())
    throw Error(ErrorKind::InvalidArgument, "prolongate: element family mismatch");
  const std::vector<int> ancestor = ancestor_triangles(cs.mesh(), fs.mesh());

  FeFunction fine(fine_space);
  std::vector<bool> done(fs.scalar_dof_count(), false);
  const int fine_n = fs.scalar_dof_count();
  for (int t = 0; t < fs.mesh().triangle_count(); ++t) {
    const int ct = ancestor[t];
    const TriangleGeometry geo = triangle_geometry(cs.mesh(), ct);
    for (int dof : fs.cell_dofs(t)) {
      if (done[dof]) continue;
      done[dof] = true;
      const auto lambda = geo.barycentric(fs.node(dof));
      for (int c = 0; c < fs.components(); ++c)
        fine.coefficients[c * fine_n + dof] = evaluate(coarse, ct, lambda, c);
    }
  }
  for (int d : fs.boundary_dofs()) fine.coefficients[d] = 0.0;
  return fine;
}

}  // namespace chds
