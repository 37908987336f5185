#include "chds/linalg.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <vector>

namespace chds {

std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::ConjugateGradient: return "cg";
    case SolveMethod::Cholesky: return "cholesky";
    case SolveMethod::SparseLu: return "lu";
  }
  return "?";
}

namespace {

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  const double bn = b.norm();
  const double r = (a * x - b).norm();
  return bn > 0.0 ? r / bn : r;
}

}  // namespace

SolveResult solve_spd(const SparseMatrix& a, const Vector& b, double tol, int direct_threshold) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw SolverError("solve_spd: dimension mismatch", {});
  const int n = static_cast<int>(a.rows());
  SolveResult out;
  if (b.norm() == 0.0) {
    out.x = Vector::Zero(n);
    out.report = {0, 0.0, SolveMethod::ConjugateGradient, true};
    return out;
  }
  if (n <= direct_threshold) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw SolverError("solve_spd: Cholesky factorization failed", {});
    out.x = ldlt.solve(b);
    out.report = {1, relative_residual(a, out.x, b), SolveMethod::Cholesky, true};
    out.report.converged = out.report.residual <= std::max(tol, 1e-14);
    if (!out.report.converged)
      throw SolverError("solve_spd: direct solve missed the tolerance (residual " +
                            std::to_string(out.report.residual) + ")",
                        out.report);
    return out;
  }

  Vector inv_diag = a.diagonal();
  for (int i = 0; i < n; ++i) {
    if (!(inv_diag[i] > 0.0)) throw SolverError("solve_spd: non-positive diagonal entry", {});
    inv_diag[i] = 1.0 / inv_diag[i];
  }
  const double bn = b.norm();
  Vector x = Vector::Zero(n);
  Vector r = b;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  const int cap = 10 * n;
  int it = 0;
  double res = 1.0;
  for (; it < cap; ++it) {
    const Vector ap = a * p;
    const double alpha = rz / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    res = r.norm() / bn;
    if (res <= tol) {
      ++it;
      break;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  // Recompute the true residual; the recurrence can drift below it.
  out.x = std::move(x);
  out.report = {it, relative_residual(a, out.x, b), SolveMethod::ConjugateGradient, true};
  out.report.converged = out.report.residual <= 10.0 * tol;
  if (!out.report.converged)
    throw SolverError("solve_spd: CG did not converge (residual " + std::to_string(out.report.residual) + " after " +
                          std::to_string(it) + " iterations)",
                      out.report);
  return out;
}

SolveResult solve_indefinite(const SparseMatrix& a, const Vector& b) {
  LuFactorization lu(a);
  SolveResult out;
  out.x = lu.solve(b);
  out.report = {1, relative_residual(a, out.x, b), SolveMethod::SparseLu, true};
  return out;
}

SparseMatrix bordered(const SparseMatrix& a, const Vector& c) {
  const int n = static_cast<int>(a.rows());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a.nonZeros() + 2 * c.size());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i) {
    if (c[i] != 0.0) {
      trip.emplace_back(i, n, c[i]);
      trip.emplace_back(n, i, c[i]);
    }
  }
  SparseMatrix out(n + 1, n + 1);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

ConstrainedPoissonSolver::ConstrainedPoissonSolver(const SparseMatrix& k, Vector c) : c_(std::move(c)) {
  lu_.factorize(bordered(k, c_));
}

Vector ConstrainedPoissonSolver::solve(const Vector& b, double mean_target) const {
  const int n = static_cast<int>(c_.size());
  Vector rhs(n + 1);
  rhs.head(n) = b;
  rhs[n] = mean_target;
  return lu_.solve(rhs).head(n);
}

Vector solve_constrained_poisson(const SparseMatrix& k, const Vector& c, const Vector& b, double tol) {
  const double total = b.sum();
  const double scale = b.lpNorm<1>();
  if (std::abs(total) > tol * std::max(scale, 1e-300) && std::abs(total) > 0.0)
    throw SolverError("solve_constrained_poisson: right-hand side is not orthogonal to constants (sum " +
                          std::to_string(total) + ")",
                      {});
  return ConstrainedPoissonSolver(k, c).solve(b);
}

}  // namespace chds
