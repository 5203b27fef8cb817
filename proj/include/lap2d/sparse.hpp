#pragma once

#include <complex>
#include <vector>

// Minimal complex sparse kit: CSR storage, dual-threshold incomplete LU
// factorization, and right-preconditioned BiCGStab.  All loops are
// sequential with a fixed order, so repeated solves of the same system are
// bitwise identical.

namespace lap2d::sparse {

using Complex = std::complex<double>;

class CsrMatrix {
 public:
  CsrMatrix() = default;

  // Build from unordered (row, col, value) triplets; duplicate entries are
  // summed, columns are sorted within each row.
  static CsrMatrix from_triplets(int rows, int cols,
                                 std::vector<int> ti, std::vector<int> tj,
                                 std::vector<Complex> tv);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t nonzeros() const { return val_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col() const { return col_; }
  const std::vector<Complex>& val() const { return val_; }

  // y = A x
  void multiply(const std::vector<Complex>& x, std::vector<Complex>& y) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_;
  std::vector<int> col_;
  std::vector<Complex> val_;
};

// Dual-threshold incomplete LU factorization (ILUT).  Entries smaller than
// `tau` times the average magnitude of the source row are dropped, and at
// most `fill` entries are kept in each of the strict lower and strict upper
// parts of every row (the diagonal is always kept).  tau = 0 with a large
// `fill` gives the exact LU factorization of matrices that need no pivoting.
class IncompleteLU {
 public:
  // Throws solver_error on a (numerically) zero pivot.
  IncompleteLU(const CsrMatrix& a, double tau, int fill);

  // z = U^{-1} L^{-1} r
  void apply(const std::vector<Complex>& r, std::vector<Complex>& z) const;

  size_t nonzeros() const { return l_val_.size() + u_val_.size(); }

 private:
  int n_ = 0;
  // L is strictly lower triangular with an implied unit diagonal; U is upper
  // triangular with the diagonal stored first in each row.
  std::vector<int> l_ptr_, l_col_;
  std::vector<Complex> l_val_;
  std::vector<int> u_ptr_, u_col_;
  std::vector<Complex> u_val_;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  int restarts = 0;
};

// Right-preconditioned BiCGStab: solves A x = b to ||b - Ax|| <= tol ||b||.
// x carries the initial guess on entry.  A breakdown triggers one restart
// with the current iterate; a second breakdown or hitting max_iter without
// convergence throws solver_error.
SolveStats bicgstab(const CsrMatrix& a, const IncompleteLU& precon,
                    const std::vector<Complex>& b, std::vector<Complex>& x,
                    double tol, int max_iter);

}  // namespace lap2d::sparse
