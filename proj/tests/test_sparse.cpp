#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "lap2d/errors.hpp"
#include "lap2d/sparse.hpp"

using namespace lap2d::sparse;
using lap2d::solver_error;

namespace {

// Dense reference multiply for cross-checking.
std::vector<Complex> dense_mul(const std::vector<std::vector<Complex>>& a,
                               const std::vector<Complex>& x) {
  std::vector<Complex> y(a.size(), Complex(0, 0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

// A small diagonally dominant complex test matrix with a fixed seed.
struct TestSystem {
  CsrMatrix matrix;
  std::vector<std::vector<Complex>> dense;
  std::vector<Complex> rhs;
};

// Banded plus one far coupling per row; the diagonal dominates the row sum,
// so the complete (no-pivot) LU factorization is well defined and stable.
TestSystem make_system(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<std::vector<Complex>> dense(n, std::vector<Complex>(n));
  std::vector<int> ti, tj;
  std::vector<Complex> tv;
  auto add = [&](int i, int j, Complex v) {
    dense[i][j] += v;  // duplicates accumulate in the dense mirror too
    ti.push_back(i);
    tj.push_back(j);
    tv.push_back(v);
  };
  for (int i = 0; i < n; ++i) {
    add(i, i, Complex(8.0 + uni(gen), 2.0));
    for (int j = std::max(0, i - 3); j <= std::min(n - 1, i + 3); ++j) {
      if (j != i) add(i, j, 0.5 * Complex(uni(gen), uni(gen)));
    }
    add(i, (i * 31 + 7) % n, 0.5 * Complex(uni(gen), uni(gen)));
  }
  TestSystem out;
  out.matrix = CsrMatrix::from_triplets(n, n, ti, tj, tv);
  out.dense = std::move(dense);
  out.rhs.resize(n);
  for (int i = 0; i < n; ++i) out.rhs[i] = Complex(uni(gen), uni(gen));
  return out;
}

}  // namespace

TEST_CASE("triplet assembly sums duplicates and sorts columns") {
  // [[2, 0], [1+1, 3]] with the (1,0) entry given twice.
  const CsrMatrix m = CsrMatrix::from_triplets(
      2, 2, {1, 0, 1, 1}, {0, 0, 1, 0},
      {Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(1, 0)});
  CHECK(m.nonzeros() == 3);
  std::vector<Complex> y;
  m.multiply({Complex(1, 0), Complex(1, 0)}, y);
  CHECK(y[0] == Complex(2, 0));
  CHECK(y[1] == Complex(5, 0));
  // columns sorted within the second row
  CHECK(m.col()[m.row_ptr()[1]] == 0);
  CHECK(m.col()[m.row_ptr()[1] + 1] == 1);

  CHECK_THROWS_AS(
      CsrMatrix::from_triplets(2, 2, {0}, {5}, {Complex(1, 0)}),
      solver_error);
  CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {0, 1}, {0}, {Complex(1, 0)}),
                  solver_error);
}

TEST_CASE("csr multiply agrees with dense arithmetic") {
  const TestSystem sys = make_system(40, 1234);
  std::vector<Complex> x(40);
  for (int i = 0; i < 40; ++i) x[i] = Complex(std::sin(i), std::cos(2 * i));
  std::vector<Complex> got;
  sys.matrix.multiply(x, got);
  const std::vector<Complex> want = dense_mul(sys.dense, x);
  for (int i = 0; i < 40; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);
}

TEST_CASE("incomplete factorization is exact on triangular matrices") {
  // A lower triangular matrix needs no elimination fill, so ILUT with a zero
  // threshold reproduces it exactly and apply() performs an exact solve.
  const int n = 30;
  std::vector<int> ti, tj;
  std::vector<Complex> tv;
  std::vector<std::vector<Complex>> dense(n, std::vector<Complex>(n));
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 3); j <= i; ++j) {
      const Complex v =
          i == j ? Complex(4.0 + uni(gen), 1.0) : Complex(uni(gen), uni(gen));
      dense[i][j] = v;
      ti.push_back(i);
      tj.push_back(j);
      tv.push_back(v);
    }
  }
  const CsrMatrix m = CsrMatrix::from_triplets(n, n, ti, tj, tv);
  const IncompleteLU ilu(m, 0.0, n);
  std::vector<Complex> x(n), b, z;
  for (int i = 0; i < n; ++i) x[i] = Complex(uni(gen), uni(gen));
  m.multiply(x, b);
  ilu.apply(b, z);
  for (int i = 0; i < n; ++i) CHECK(std::abs(z[i] - x[i]) < 1e-12);
}

TEST_CASE("incomplete factorization with zero threshold solves exactly") {
  // With tau = 0 and unlimited fill the factorization is a complete LU of
  // this diagonally dominant matrix, so one apply() inverts it.
  const TestSystem sys = make_system(60, 777);
  const IncompleteLU ilu(sys.matrix, 0.0, 60);
  std::vector<Complex> x(60), b, z;
  for (int i = 0; i < 60; ++i) x[i] = Complex(std::sin(0.3 * i), i % 5);
  sys.matrix.multiply(x, b);
  ilu.apply(b, z);
  for (int i = 0; i < 60; ++i) CHECK(std::abs(z[i] - x[i]) < 1e-10);
}

TEST_CASE("factorization rejects structural defects") {
  // Missing diagonal.
  CHECK_THROWS_AS(
      IncompleteLU(CsrMatrix::from_triplets(2, 2, {0, 1}, {1, 0},
                                            {Complex(1, 0), Complex(1, 0)}),
                   0.0, 2),
      solver_error);
  // Zero pivot.
  CHECK_THROWS_AS(
      IncompleteLU(CsrMatrix::from_triplets(
                       2, 2, {0, 0, 1, 1}, {0, 1, 0, 1},
                       {Complex(0, 0), Complex(1, 0), Complex(1, 0),
                        Complex(1, 0)}),
                   0.0, 2),
      solver_error);
}

TEST_CASE("bicgstab solves a diagonally dominant system to tolerance") {
  const TestSystem sys = make_system(200, 4321);
  const IncompleteLU precon(sys.matrix, 1e-3, 10);
  std::vector<Complex> x;
  const SolveStats st =
      bicgstab(sys.matrix, precon, sys.rhs, x, 1e-12, 500);
  CHECK(st.converged);
  CHECK(st.relative_residual <= 1e-12);
  std::vector<Complex> r;
  sys.matrix.multiply(x, r);
  double dev = 0.0, scale = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    dev += std::norm(r[i] - sys.rhs[i]);
    scale += std::norm(sys.rhs[i]);
  }
  CHECK(std::sqrt(dev / scale) <= 1e-12);
}

TEST_CASE("bicgstab with zero right-hand side returns zero immediately") {
  const TestSystem sys = make_system(50, 5);
  const IncompleteLU precon(sys.matrix, 1e-3, 10);
  std::vector<Complex> x(50, Complex(1.0, 1.0));  // non-zero initial guess
  const SolveStats st = bicgstab(sys.matrix, precon,
                                 std::vector<Complex>(50, Complex(0, 0)), x,
                                 1e-12, 100);
  CHECK(st.converged);
  CHECK(st.iterations == 0);
  for (const Complex& v : x) CHECK(v == Complex(0, 0));
}

TEST_CASE("bicgstab throws after exhausting iterations") {
  const TestSystem sys = make_system(200, 4321);
  const IncompleteLU precon(sys.matrix, 1e-3, 10);
  std::vector<Complex> x;
  CHECK_THROWS_AS(bicgstab(sys.matrix, precon, sys.rhs, x, 1e-14, 2),
                  solver_error);
}

TEST_CASE("repeated solves are bitwise identical") {
  const TestSystem sys = make_system(150, 2024);
  std::vector<std::vector<Complex>> runs;
  for (int run = 0; run < 2; ++run) {
    const IncompleteLU precon(sys.matrix, 1e-3, 10);
    std::vector<Complex> x;
    bicgstab(sys.matrix, precon, sys.rhs, x, 1e-11, 500);
    runs.push_back(x);
  }
  for (size_t i = 0; i < runs[0].size(); ++i) {
    CHECK(runs[0][i].real() == runs[1][i].real());
    CHECK(runs[0][i].imag() == runs[1][i].imag());
  }
}
