#pragma once

#include "chds/fe_space.hpp"

namespace chds {

/// Exact injection of a coarse-level finite element function into a nested fine space.
///
/// The fine mesh must descend from the coarse mesh through uniform_refine() and both spaces
/// must share the element family. The result is pointwise identical to the input.
FeFunction prolongate(const FeFunction& coarse, const SpacePtr& fine_space);

/// Ancestor triangle on `coarse` of every triangle of `fine`.
std::vector<int> ancestor_triangles(const Mesh& coarse, const Mesh& fine);

}  // namespace chds
