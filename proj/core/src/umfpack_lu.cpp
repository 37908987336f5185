#include <umfpack.h>

#include <string>
#include <vector>

#include "chds/linalg.hpp"

namespace chds {

struct LuFactorization::Impl {
  std::vector<int> ap, ai;
  std::vector<double> ax;
  int n = 0;
  void* symbolic = nullptr;
  void* numeric = nullptr;
  double control[UMFPACK_CONTROL];

  Impl() {
    umfpack_di_defaults(control);
    // Every matrix factorized here has a symmetric pattern; the unsymmetric default ordering
    // fills saddle-point blocks badly.
    control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    control[UMFPACK_IRSTEP] = 0;
  }
  ~Impl() { release(); }

  void release_numeric() {
    if (numeric) umfpack_di_free_numeric(&numeric);
    numeric = nullptr;
  }
  void release() {
    release_numeric();
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
    symbolic = nullptr;
  }

  int zero_pivot_column() {
    int lnz = 0, unz = 0, nrow = 0, ncol = 0, nz_udiag = 0;
    umfpack_di_get_lunz(&lnz, &unz, &nrow, &ncol, &nz_udiag, numeric);
    std::vector<double> udiag(n);
    std::vector<int> q(n);
    int do_recip = 0;
    umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, q.data(), udiag.data(),
                           &do_recip, nullptr, numeric);
    for (int k = 0; k < n; ++k)
      if (udiag[k] == 0.0) return q[k];
    return -1;
  }
};

LuFactorization::LuFactorization() : impl_(std::make_unique<Impl>()) {}
LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

int LuFactorization::rows() const { return impl_->n; }
bool LuFactorization::ready() const { return impl_->numeric != nullptr; }

void LuFactorization::factorize(const SparseMatrix& input) {
  if (input.rows() != input.cols()) throw SolverError("LU: matrix is not square", {});
  SparseMatrix a = input;
  a.makeCompressed();
  Impl& m = *impl_;
  const int n = static_cast<int>(a.rows());
  const int nnz = static_cast<int>(a.nonZeros());
  const bool same_pattern = m.symbolic != nullptr && m.n == n && static_cast<int>(m.ai.size()) == nnz &&
                            std::equal(m.ap.begin(), m.ap.end(), a.outerIndexPtr()) &&
                            std::equal(m.ai.begin(), m.ai.end(), a.innerIndexPtr());
  m.release_numeric();
  if (!same_pattern) {
    m.release();
    m.n = n;
    m.ap.assign(a.outerIndexPtr(), a.outerIndexPtr() + n + 1);
    m.ai.assign(a.innerIndexPtr(), a.innerIndexPtr() + nnz);
  }
  m.ax.assign(a.valuePtr(), a.valuePtr() + nnz);
  double info[UMFPACK_INFO];
  if (!same_pattern) {
    const int status = umfpack_di_symbolic(n, n, m.ap.data(), m.ai.data(), m.ax.data(), &m.symbolic, m.control, info);
    if (status != UMFPACK_OK) throw SolverError("LU: symbolic analysis failed (status " + std::to_string(status) + ")", {});
  }
  const int status = umfpack_di_numeric(m.ap.data(), m.ai.data(), m.ax.data(), m.symbolic, &m.numeric, m.control, info);
  if (status == UMFPACK_WARNING_singular_matrix) {
    const int col = m.zero_pivot_column();
    m.release_numeric();
    throw SingularMatrixError("LU: matrix is singular, zero pivot in column " + std::to_string(col), col);
  }
  if (status != UMFPACK_OK) {
    m.release_numeric();
    throw SolverError("LU: numeric factorization failed (status " + std::to_string(status) + ")", {});
  }
}

Vector LuFactorization::solve(const Vector& b) const {
  const Impl& m = *impl_;
  if (!m.numeric) throw SolverError("LU: solve called before factorize", {});
  if (b.size() != m.n) throw SolverError("LU: right-hand side has the wrong length", {});
  Vector x(m.n);
  double info[UMFPACK_INFO];
  const int status = umfpack_di_solve(UMFPACK_A, m.ap.data(), m.ai.data(), m.ax.data(), x.data(), b.data(), m.numeric,
                                      m.control, info);
  if (status != UMFPACK_OK) throw SolverError("LU: solve failed (status " + std::to_string(status) + ")", {});
  return x;
}

}  // namespace chds
