#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "chds/fe_space.hpp"
#include "chds/linalg.hpp"
#include "chds/mesh.hpp"

namespace chds {

class NegNormWorkspace;

/// Spaces and parameter-independent matrices of the Taylor-Hood discretization on one mesh:
/// P1 for phi, mu, xi and p (p, xi mean-zero), P2^2 with homogeneous Dirichlet data for u.
///
/// Velocity vectors are stored over all dofs (boundary entries zero); saddle-point systems act
/// on the interior ("free") dofs only.
class Discretization {
 public:
  explicit Discretization(MeshPtr mesh);
  ~Discretization();
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const SpacePtr& scalar_space() const { return p1_; }
  const SpacePtr& pressure_space() const { return pressure_; }
  const SpacePtr& velocity_space() const { return velocity_; }
  const SpacePtr& p2_space() const { return p2_; }
  double area() const { return area_; }

  /// P1 mass and stiffness, and (1, psi_i).
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const Vector& ones_mass() const { return ones_; }
  /// H1 Gram matrix M + K of the P1 space.
  const SparseMatrix& h1_gram() const { return h1_; }

  /// Full vector mass / stiffness and (div v_j, q_i).
  const SparseMatrix& velocity_mass() const { return vmass_; }
  const SparseMatrix& velocity_stiffness() const { return vstiff_; }
  const SparseMatrix& divergence() const { return div_; }

  const std::vector<int>& free_velocity_dofs() const { return velocity_->free_dofs(); }
  int free_velocity_count() const { return static_cast<int>(velocity_->free_dofs().size()); }
  Vector restrict_velocity(const Vector& full) const;
  Vector expand_velocity(const Vector& free) const;
  /// Columns of a (rows x all velocity dofs) matrix restricted to the free dofs.
  SparseMatrix restrict_columns(const SparseMatrix& m) const;

  const NegNormWorkspace& neg_norm_workspace() const { return *negnorm_; }

 private:
  MeshPtr mesh_;
  SpacePtr p1_, pressure_, p2_, velocity_;
  double area_ = 0.0;
  SparseMatrix mass_, stiffness_, h1_, vmass_, vstiff_, div_;
  Vector ones_;
  std::vector<int> free_index_;  // full velocity dof -> free index or -1
  std::unique_ptr<NegNormWorkspace> negnorm_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

/// Factorized Taylor-Hood saddle-point operator
///
///   alpha (u, v) + lambda a(u, v) - c(v, p) = f(v)       for all v in X_h
///   c(u, q)                                 = g(q)       for all q in S_h
///   (p, 1)                                  = 0
///
/// The mean-zero pressure is realized through a scalar Lagrange multiplier.
class DarcyStokesSolver {
 public:
  DarcyStokesSolver(const Discretization& disc, double alpha, double lambda);

  /// `momentum_rhs` has one entry per velocity dof (boundary entries ignored);
  /// `continuity_rhs`, when given, one entry per pressure dof.
  std::pair<Vector, Vector> solve(const Vector& momentum_rhs, const Vector* continuity_rhs = nullptr) const;

  double alpha() const { return alpha_; }
  double lambda() const { return lambda_; }

 private:
  const Discretization& disc_;
  double alpha_, lambda_;
  LuFactorization lu_;
};

}  // namespace chds
