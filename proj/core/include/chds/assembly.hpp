#pragma once

#include "chds/fe_space.hpp"
#include "chds/linalg.hpp"

namespace chds {

enum class FormKind {
  Mass,             // (trial, test); block diagonal on the vector space
  Stiffness,        // (grad trial, grad test)
  VectorMass,       // Mass restricted to the vector space
  VectorStiffness,  // Stiffness restricted to the vector space
  Divergence,       // (div v_j, q_i): vector trial, scalar test
  Convection,       // (grad phi . v_j, nu_i): vector trial, scalar test, phi in P1
  CubicJacobian,    // (3 phi^2 trial, test): scalar spaces, phi in P1
};

struct MatrixForm {
  FormKind kind = FormKind::Mass;
  const FeFunction* phi = nullptr;

  static MatrixForm mass() { return {FormKind::Mass, nullptr}; }
  static MatrixForm stiffness() { return {FormKind::Stiffness, nullptr}; }
  static MatrixForm vector_mass() { return {FormKind::VectorMass, nullptr}; }
  static MatrixForm vector_stiffness() { return {FormKind::VectorStiffness, nullptr}; }
  static MatrixForm divergence() { return {FormKind::Divergence, nullptr}; }
  static MatrixForm convection(const FeFunction& phi) { return {FormKind::Convection, &phi}; }
  static MatrixForm cubic_jacobian(const FeFunction& phi) { return {FormKind::CubicJacobian, &phi}; }
};

/// Global matrix with rows indexed by test dofs and columns by trial dofs.
SparseMatrix assemble_matrix(const MatrixForm& form, const FeSpace& trial, const FeSpace& test);

enum class VectorFormKind {
  Cubic,         // (phi^3, psi_i)
  WeightedMass,  // (g, psi_i)
};

Vector assemble_vector(VectorFormKind kind, const FeFunction& coefficient, const FeSpace& test);

/// (f, psi_i) with f sampled at the quadrature points.
Vector assemble_load(const FeSpace& test, const std::function<double(const Point&)>& f);
/// (grad f, grad psi_i).
Vector assemble_gradient_load(const FeSpace& test, const std::function<Vec2(const Point&)>& grad_f);

enum class NormKind { L2, H1Semi, H1, LinfNodal };

/// L2 / H1 norms by quadrature. LinfNodal is the largest absolute coefficient, a nodal
/// surrogate for the true maximum.
double fe_norm(const FeFunction& f, NormKind kind);

/// Norm of f - exact, by quadrature. The exact gradient is needed only for H1 kinds.
double error_norm(const FeFunction& f, const ScalarField& exact, NormKind kind);
double error_norm(const FeFunction& f, const VectorField& exact, NormKind kind);

/// (f, 1).
double integrate(const FeFunction& f);

}  // namespace chds
