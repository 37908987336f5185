#include "chds/discretization.hpp"

#include <vector>

#include "chds/assembly.hpp"
#include "chds/operators.hpp"

namespace chds {

Discretization::Discretization(MeshPtr mesh) : mesh_(std::move(mesh)) {
  if (!mesh_) throw Error(ErrorKind::InvalidArgument, "Discretization: null mesh");
  p1_ = std::make_shared<const FeSpace>(mesh_, Family::P1);
  pressure_ = std::make_shared<const FeSpace>(mesh_, Family::P1, true);
  p2_ = std::make_shared<const FeSpace>(mesh_, Family::P2);
  velocity_ = std::make_shared<const FeSpace>(mesh_, Family::P2Vector);
  area_ = mesh_->domain().area();

  mass_ = assemble_matrix(MatrixForm::mass(), *p1_, *p1_);
  stiffness_ = assemble_matrix(MatrixForm::stiffness(), *p1_, *p1_);
  h1_ = mass_ + stiffness_;
  ones_ = mass_ * Vector::Ones(p1_->dof_count());
  vmass_ = assemble_matrix(MatrixForm::vector_mass(), *velocity_, *velocity_);
  vstiff_ = assemble_matrix(MatrixForm::vector_stiffness(), *velocity_, *velocity_);
  div_ = assemble_matrix(MatrixForm::divergence(), *velocity_, *p1_);

  free_index_.assign(velocity_->dof_count(), -1);
  const auto& free = velocity_->free_dofs();
  for (std::size_t i = 0; i < free.size(); ++i) free_index_[free[i]] = static_cast<int>(i);

  negnorm_ = std::make_unique<NegNormWorkspace>(p1_, mass_, stiffness_);
}

Discretization::~Discretization() = default;

Vector Discretization::restrict_velocity(const Vector& full) const {
  const auto& free = velocity_->free_dofs();
  Vector out(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) out[i] = full[free[i]];
  return out;
}

Vector Discretization::expand_velocity(const Vector& reduced) const {
  Vector out = Vector::Zero(velocity_->dof_count());
  const auto& free = velocity_->free_dofs();
  for (std::size_t i = 0; i < free.size(); ++i) out[free[i]] = reduced[i];
  return out;
}

SparseMatrix Discretization::restrict_columns(const SparseMatrix& m) const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.nonZeros());
  for (int k = 0; k < m.outerSize(); ++k) {
    const int j = free_index_[k];
    if (j < 0) continue;
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) trip.emplace_back(it.row(), j, it.value());
  }
  SparseMatrix out(m.rows(), free_velocity_count());
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

DarcyStokesSolver::DarcyStokesSolver(const Discretization& disc, double alpha, double lambda)
    : disc_(disc), alpha_(alpha), lambda_(lambda) {
  const int nf = disc.free_velocity_count();
  const int np = disc.pressure_space()->dof_count();
  const SparseMatrix a_full = alpha * disc.velocity_mass() + lambda * disc.velocity_stiffness();
  const auto& free = disc.free_velocity_dofs();
  std::vector<int> index(disc.velocity_space()->dof_count(), -1);
  for (int i = 0; i < nf; ++i) index[free[i]] = i;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a_full.nonZeros() + 2 * disc.divergence().nonZeros() + 2 * np);
  for (int k = 0; k < a_full.outerSize(); ++k) {
    if (index[k] < 0) continue;
    for (SparseMatrix::InnerIterator it(a_full, k); it; ++it)
      if (index[it.row()] >= 0) trip.emplace_back(index[it.row()], index[k], it.value());
  }
  const SparseMatrix& c = disc.divergence();
  for (int k = 0; k < c.outerSize(); ++k) {
    if (index[k] < 0) continue;
    for (SparseMatrix::InnerIterator it(c, k); it; ++it) {
      trip.emplace_back(nf + it.row(), index[k], -it.value());
      trip.emplace_back(index[k], nf + it.row(), -it.value());
    }
  }
  const Vector& ones = disc.ones_mass();
  for (int i = 0; i < np; ++i) {
    trip.emplace_back(nf + i, nf + np, ones[i]);
    trip.emplace_back(nf + np, nf + i, ones[i]);
  }
  SparseMatrix system(nf + np + 1, nf + np + 1);
  system.setFromTriplets(trip.begin(), trip.end());
  system.makeCompressed();
  lu_.factorize(system);
}

std::pair<Vector, Vector> DarcyStokesSolver::solve(const Vector& momentum_rhs, const Vector* continuity_rhs) const {
  const int nf = disc_.free_velocity_count();
  const int np = disc_.pressure_space()->dof_count();
  Vector rhs = Vector::Zero(nf + np + 1);
  rhs.head(nf) = disc_.restrict_velocity(momentum_rhs);
  // The continuity row is stored negated to keep the system symmetric.
  if (continuity_rhs) rhs.segment(nf, np) = -*continuity_rhs;
  const Vector x = lu_.solve(rhs);
  return {disc_.expand_velocity(x.head(nf)), x.segment(nf, np)};
}

}  // namespace chds
