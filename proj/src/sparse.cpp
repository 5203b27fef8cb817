#include "lap2d/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "lap2d/errors.hpp"

namespace lap2d::sparse {

namespace {

double nrm2(const std::vector<Complex>& v) {
  double acc = 0.0;
  for (const Complex& c : v) acc += std::norm(c);
  return std::sqrt(acc);
}

// <a, b> with the first argument conjugated.
Complex dotc(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex acc(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

}  // namespace

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<int> ti,
                                   std::vector<int> tj,
                                   std::vector<Complex> tv) {
  if (ti.size() != tj.size() || ti.size() != tv.size()) {
    throw solver_error("CsrMatrix: triplet arrays disagree in length");
  }
  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  std::vector<size_t> order(ti.size());
  std::iota(order.begin(), order.end(), size_t(0));
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return ti[a] != ti[b] ? ti[a] < ti[b] : tj[a] < tj[b];
  });
  m.row_ptr_.assign(size_t(rows) + 1, 0);
  int last_i = -1;
  int last_j = -1;
  for (size_t idx : order) {
    const int i = ti[idx];
    const int j = tj[idx];
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      throw solver_error("CsrMatrix: triplet index out of range");
    }
    if (i == last_i && j == last_j) {
      m.val_.back() += tv[idx];  // duplicate entry: accumulate
      continue;
    }
    m.col_.push_back(j);
    m.val_.push_back(tv[idx]);
    ++m.row_ptr_[size_t(i) + 1];
    last_i = i;
    last_j = j;
  }
  for (size_t r = 1; r < m.row_ptr_.size(); ++r) {
    m.row_ptr_[r] += m.row_ptr_[r - 1];
  }
  return m;
}

void CsrMatrix::multiply(const std::vector<Complex>& x,
                         std::vector<Complex>& y) const {
  y.assign(size_t(rows_), Complex(0.0, 0.0));
  for (int i = 0; i < rows_; ++i) {
    Complex acc(0.0, 0.0);
    for (int p = row_ptr_[i]; p < row_ptr_[size_t(i) + 1]; ++p) {
      acc += val_[p] * x[col_[p]];
    }
    y[i] = acc;
  }
}

IncompleteLU::IncompleteLU(const CsrMatrix& a, double tau, int fill)
    : n_(a.rows()) {
  if (fill < 0) throw solver_error("IncompleteLU: fill must be non-negative");
  const auto& arp = a.row_ptr();
  const auto& acol = a.col();
  const auto& aval = a.val();

  l_ptr_.assign(size_t(n_) + 1, 0);
  u_ptr_.assign(size_t(n_) + 1, 0);

  // Dense workspace for the current row: values, pattern membership, and the
  // set of touched columns (split below/above the diagonal).
  std::vector<Complex> w(n_, Complex(0.0, 0.0));
  std::vector<char> in_pattern(n_, 0);
  std::vector<int> lower_cols, upper_cols, touched;
  struct Entry {
    int col;
    Complex value;
  };
  std::vector<Entry> keep;

  for (int i = 0; i < n_; ++i) {
    lower_cols.clear();
    upper_cols.clear();
    touched.clear();

    // Load row i of A and its drop threshold (tau times the average entry
    // magnitude of the row).
    double row_scale = 0.0;
    int row_count = 0;
    bool has_diag = false;
    for (int p = arp[i]; p < arp[size_t(i) + 1]; ++p) {
      const int j = acol[p];
      w[j] = aval[p];
      in_pattern[j] = 1;
      touched.push_back(j);
      if (j < i) {
        lower_cols.push_back(j);
      } else if (j > i) {
        upper_cols.push_back(j);
      } else {
        has_diag = true;
      }
      row_scale += std::abs(aval[p]);
      ++row_count;
    }
    if (!has_diag)
      throw solver_error("IncompleteLU: structurally zero diagonal at row " +
                         std::to_string(i));
    // L entries (multipliers) are dimensionless, so they are tested against
    // tau itself; U entries carry the row scale, so their threshold is tau
    // times the average entry magnitude of the row.
    const double droptol_l = tau;
    const double droptol_u =
        row_count > 0 ? tau * row_scale / row_count : 0.0;

    // Eliminate with rows k < i in ascending column order; fill-in created
    // below the diagonal lands ahead of the sweep and is inserted in order.
    std::make_heap(lower_cols.begin(), lower_cols.end(), std::greater<int>());
    while (!lower_cols.empty()) {
      std::pop_heap(lower_cols.begin(), lower_cols.end(),
                    std::greater<int>());
      const int k = lower_cols.back();
      lower_cols.pop_back();
      const Complex fact = w[k] / u_val_[u_ptr_[k]];  // U diagonal is first
      if (std::abs(fact) <= droptol_l) {
        w[k] = Complex(0.0, 0.0);  // dropped from L
        continue;
      }
      w[k] = fact;
      for (int p = u_ptr_[k] + 1; p < u_ptr_[size_t(k) + 1]; ++p) {
        const int j = u_col_[p];
        const Complex delta = fact * u_val_[p];
        if (in_pattern[j]) {
          w[j] -= delta;
        } else {
          w[j] = -delta;
          in_pattern[j] = 1;
          touched.push_back(j);
          if (j < i) {
            lower_cols.push_back(j);
            std::push_heap(lower_cols.begin(), lower_cols.end(),
                           std::greater<int>());
          } else if (j > i) {
            upper_cols.push_back(j);
          }
        }
      }
    }

    // Select the surviving entries: drop below threshold, then keep the
    // `fill` largest per part (ties broken by column for determinism).
    auto select_part = [&](bool lower) {
      const double droptol = lower ? droptol_l : droptol_u;
      keep.clear();
      for (int j : touched) {
        if (lower ? j >= i : j <= i) continue;
        if (std::abs(w[j]) > droptol && w[j] != Complex(0.0, 0.0))
          keep.push_back({j, w[j]});
      }
      if (int(keep.size()) > fill) {
        std::nth_element(keep.begin(), keep.begin() + fill, keep.end(),
                         [](const Entry& a, const Entry& b) {
                           const double ma = std::abs(a.value);
                           const double mb = std::abs(b.value);
                           return ma != mb ? ma > mb : a.col < b.col;
                         });
        keep.resize(size_t(fill));
      }
      std::sort(keep.begin(), keep.end(),
                [](const Entry& a, const Entry& b) { return a.col < b.col; });
    };

    select_part(/*lower=*/true);
    for (const Entry& e : keep) {
      l_col_.push_back(e.col);
      l_val_.push_back(e.value);
    }
    l_ptr_[size_t(i) + 1] = int(l_col_.size());

    const Complex diag = w[i];
    if (std::abs(diag) == 0.0)
      throw solver_error("IncompleteLU: zero pivot at row " +
                         std::to_string(i));
    u_col_.push_back(i);
    u_val_.push_back(diag);
    select_part(/*lower=*/false);
    for (const Entry& e : keep) {
      u_col_.push_back(e.col);
      u_val_.push_back(e.value);
    }
    u_ptr_[size_t(i) + 1] = int(u_col_.size());

    for (int j : touched) {
      w[j] = Complex(0.0, 0.0);
      in_pattern[j] = 0;
    }
  }
}

void IncompleteLU::apply(const std::vector<Complex>& r,
                         std::vector<Complex>& z) const {
  z = r;
  // forward solve L z = r (unit diagonal)
  for (int i = 0; i < n_; ++i) {
    Complex acc = z[i];
    for (int p = l_ptr_[i]; p < l_ptr_[size_t(i) + 1]; ++p) {
      acc -= l_val_[p] * z[l_col_[p]];
    }
    z[i] = acc;
  }
  // backward solve U z = z (diagonal stored first in each row)
  for (int i = n_ - 1; i >= 0; --i) {
    Complex acc = z[i];
    for (int p = u_ptr_[i] + 1; p < u_ptr_[size_t(i) + 1]; ++p) {
      acc -= u_val_[p] * z[u_col_[p]];
    }
    z[i] = acc / u_val_[u_ptr_[i]];
  }
}

SolveStats bicgstab(const CsrMatrix& a, const IncompleteLU& precon,
                    const std::vector<Complex>& b, std::vector<Complex>& x,
                    double tol, int max_iter) {
  const size_t n = b.size();
  if (x.size() != n) x.assign(n, Complex(0.0, 0.0));
  const double bnorm = nrm2(b);
  SolveStats stats;
  if (bnorm == 0.0) {
    x.assign(n, Complex(0.0, 0.0));
    stats.converged = true;
    return stats;
  }

  std::vector<Complex> r(n), r0(n), p(n), v(n), s(n), t(n), phat(n), shat(n);
  a.multiply(x, r);
  for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

  auto restart = [&] {
    r0 = r;
    p = r;
  };
  restart();
  Complex rho = dotc(r0, r);
  double rnorm = nrm2(r);

  const double breakdown = 1e-300;
  for (stats.iterations = 1; stats.iterations <= max_iter;
       ++stats.iterations) {
    precon.apply(p, phat);
    a.multiply(phat, v);
    const Complex r0v = dotc(r0, v);
    if (std::abs(r0v) < breakdown) {
      if (stats.restarts++ > 0) {
        throw solver_error("bicgstab: repeated breakdown (r0.v ~ 0)");
      }
      restart();
      rho = dotc(r0, r);
      continue;
    }
    const Complex alpha = rho / r0v;
    for (size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (nrm2(s) <= tol * bnorm) {
      // converged at the half step; confirm with the true residual
      for (size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
      a.multiply(x, t);
      for (size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
      rnorm = nrm2(r);
      if (rnorm <= tol * bnorm) break;
      restart();
      rho = dotc(r0, r);
      continue;
    }
    precon.apply(s, shat);
    a.multiply(shat, t);
    const Complex tdots = dotc(t, s);
    const double tnorm2 = dotc(t, t).real();
    if (tnorm2 < breakdown) {
      if (stats.restarts++ > 0) {
        throw solver_error("bicgstab: repeated breakdown (t ~ 0)");
      }
      for (size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
      a.multiply(x, r);
      for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
      restart();
      rho = dotc(r0, r);
      continue;
    }
    const Complex omega = tdots / tnorm2;
    for (size_t i = 0; i < n; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    rnorm = nrm2(r);
    if (rnorm <= tol * bnorm) break;
    // An unstable preconditioner makes the iteration blow up rather than
    // stagnate; abort early so the caller can rebuild a stronger one.
    if (stats.iterations > 10 && rnorm > 1e4 * bnorm) {
      throw solver_error(
          "bicgstab: divergence (residual grew beyond 1e4 of the "
          "right-hand side)");
    }
    const Complex rho_new = dotc(r0, r);
    if (std::abs(rho_new) < breakdown || std::abs(omega) < breakdown) {
      if (stats.restarts++ > 0) {
        throw solver_error("bicgstab: repeated breakdown (rho/omega ~ 0)");
      }
      restart();
      rho = dotc(r0, r);
      continue;
    }
    const Complex beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (size_t i = 0; i < n; ++i) {
      p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
  }

  stats.relative_residual = rnorm / bnorm;
  stats.converged = stats.relative_residual <= tol;
  if (!stats.converged) {
    std::ostringstream os;
    os << "bicgstab: no convergence after " << max_iter
       << " iterations, relative residual " << stats.relative_residual;
    throw solver_error(os.str());
  }
  return stats;
}

}  // namespace lap2d::sparse
