#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <string_view>

#include "chds/error.hpp"

namespace chds {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vector = Eigen::VectorXd;

enum class SolveMethod { ConjugateGradient, Cholesky, SparseLu };
std::string_view to_string(SolveMethod method);

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // final ||Ax - b|| / ||b||
  SolveMethod method = SolveMethod::SparseLu;
  bool converged = true;
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, SolveReport report)
      : Error(ErrorKind::Solver, what), report_(report) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Raised when a direct factorization hits an exactly zero pivot.
class SingularMatrixError : public SolverError {
 public:
  SingularMatrixError(const std::string& what, int column)
      : SolverError(what, SolveReport{0, 0.0, SolveMethod::SparseLu, false}), column_(column) {}
  /// Column of the input matrix whose pivot vanished.
  int column() const { return column_; }

 private:
  int column_;
};

/// Sparse LU (UMFPACK) with reusable symbolic analysis. Immutable after factorize(), so
/// solve() may be called concurrently.
class LuFactorization {
 public:
  LuFactorization();
  ~LuFactorization();
  LuFactorization(LuFactorization&&) noexcept;
  LuFactorization& operator=(LuFactorization&&) noexcept;
  LuFactorization(const LuFactorization&) = delete;
  LuFactorization& operator=(const LuFactorization&) = delete;

  explicit LuFactorization(const SparseMatrix& a) : LuFactorization() { factorize(a); }

  /// Numeric factorization. The symbolic analysis is redone only when the sparsity pattern
  /// differs from the previous call.
  void factorize(const SparseMatrix& a);
  Vector solve(const Vector& b) const;
  int rows() const;
  bool ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Preconditioned conjugate gradients (Jacobi) with a direct Cholesky fallback for systems of
/// dimension at most `direct_threshold`. Iteration cap 10 * dim.
SolveResult solve_spd(const SparseMatrix& a, const Vector& b, double tol = 1e-12, int direct_threshold = 400);

/// Direct sparse LU; throws SingularMatrixError on a zero pivot.
SolveResult solve_indefinite(const SparseMatrix& a, const Vector& b);

/// [[A, c], [c^T, 0]].
SparseMatrix bordered(const SparseMatrix& a, const Vector& c);

/// Zero-mean solution of the Neumann problem K x = b subject to (x, 1) = c^T x = 0, where c holds
/// the integrals of the basis functions. Rejects b whose constant component sum(b) exceeds
/// tol * ||b||_1.
Vector solve_constrained_poisson(const SparseMatrix& k, const Vector& c, const Vector& b, double tol = 1e-10);

/// Cached factorization of the bordered Neumann matrix.
class ConstrainedPoissonSolver {
 public:
  ConstrainedPoissonSolver(const SparseMatrix& k, Vector c);
  /// Solves K x + c l = b, c^T x = mean_target. Returns x; the multiplier is dropped.
  Vector solve(const Vector& b, double mean_target = 0.0) const;
  const Vector& constraint() const { return c_; }

 private:
  Vector c_;
  LuFactorization lu_;
};

}  // namespace chds
