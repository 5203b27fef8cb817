#include "lap2d/fd_solver.hpp"

#include <cmath>

#include "lap2d/errors.hpp"
#include "lap2d/parallel.hpp"
#include "lap2d/special_functions.hpp"

namespace lap2d::solver {

using kernels::hankel1_0;
using kernels::hankel1_1;

BoundaryClosure BoundaryClosure::dirichlet() { return {}; }

BoundaryClosure BoundaryClosure::robin(Complex k, int mode) {
  if (mode != 0 && mode != 1) {
    throw domain_error("BoundaryClosure::robin: modes 0 and 1 only");
  }
  if (k == Complex(0.0, 0.0)) {
    if (mode == 0) {
      throw domain_error(
          "BoundaryClosure::robin: the static monopole has no outgoing "
          "closure; use mode 1 or k != 0");
    }
  } else if (k.imag() < 0.0) {
    throw domain_error("BoundaryClosure::robin: need Im k >= 0");
  }
  BoundaryClosure c;
  c.kind = Kind::robin_radiation;
  c.k = k;
  c.mode = mode;
  return c;
}

Complex radiation_log_derivative(Complex k, int mode, double r) {
  if (!(r > 0.0)) {
    throw domain_error("radiation_log_derivative: r must be positive");
  }
  if (mode != 0 && mode != 1) {
    throw domain_error("radiation_log_derivative: modes 0 and 1 only");
  }
  if (k == Complex(0.0, 0.0)) {
    if (mode == 0) {
      throw domain_error("radiation_log_derivative: k = 0 requires mode 1");
    }
    return Complex(-mode / r, 0.0);  // d/dr ln(r^-m)
  }
  const Complex z = k * r;
  if (mode == 0) {
    // H0' = -H1
    return -k * hankel1_1(z) / hankel1_0(z);
  }
  // H1'(z) = H0(z) - H1(z)/z
  return k * hankel1_0(z) / hankel1_1(z) - Complex(1.0 / r, 0.0);
}

namespace {

struct EdgeCoefficients {
  double a11, a12, a22;
};

EdgeCoefficients edge_coeffs(const model::CoefficientField& a, Point2 p) {
  const model::Matrix2 m = a(p);
  if (!(m.eig_min() > 0.0)) {
    throw solver_error("assemble: singular stencil (coefficient matrix not "
                       "positive definite at an edge midpoint)");
  }
  return {m.a11, m.a12, m.a22};
}

}  // namespace

AssembledSystem assemble(const model::CoefficientField& a,
                         const model::SpectralShift& shift, const Grid& grid,
                         const BoundaryClosure& closure) {
  if (grid.half_width < 4.0 * a.perturbation_radius) {
    throw config_error("assemble: grid half-width must be >= 4x the "
                       "coefficient perturbation radius");
  }
  const int n = grid.n;
  const double h = grid.spacing();
  const double inv_h = 1.0 / h;
  const double inv_4h = 1.0 / (4.0 * h);
  const Complex sigma = shift.sigma();

  std::vector<int> ti, tj;
  std::vector<Complex> tv;
  ti.reserve(size_t(n) * n * 9);
  tj.reserve(size_t(n) * n * 9);
  tv.reserve(size_t(n) * n * 9);

  const auto interior_row = [&](int ix, int iy) {
    return grid.interior(ix, iy);
  };
  // The equation at an interior node is
  //   -(Fx_e - Fx_w)/h - (Fy_n - Fy_s)/h + sigma u = f,
  // so an edge flux F enters the row on its negative side with -F/h and the
  // row on its positive side with +F/h.  Each flux stencil is accumulated
  // into both adjacent rows (skipping closure rows), which makes the scheme
  // conservative by construction.
  const auto add = [&](int row, int col, Complex v) {
    ti.push_back(row);
    tj.push_back(col);
    tv.push_back(v);
  };

  // Vertical edges between (ix, iy) and (ix+1, iy):
  //   Fx = a11 (u_{i+1,j} - u_{i,j})/h
  //      + a12 (u_{i,j+1} + u_{i+1,j+1} - u_{i,j-1} - u_{i+1,j-1})/(4h)
  for (int iy = 1; iy < n - 1; ++iy) {
    for (int ix = 0; ix < n - 1; ++ix) {
      const Point2 mid{grid.coord(ix) + 0.5 * h, grid.coord(iy)};
      const EdgeCoefficients c = edge_coeffs(a, mid);
      const int left = grid.index(ix, iy);
      const int right = grid.index(ix + 1, iy);
      // (node, flux coefficient) pairs for this edge
      const std::pair<int, double> stencil[] = {
          {right, c.a11 * inv_h},
          {left, -c.a11 * inv_h},
          {grid.index(ix, iy + 1), c.a12 * inv_4h},
          {grid.index(ix + 1, iy + 1), c.a12 * inv_4h},
          {grid.index(ix, iy - 1), -c.a12 * inv_4h},
          {grid.index(ix + 1, iy - 1), -c.a12 * inv_4h},
      };
      for (const auto& [node, coeff] : stencil) {
        if (coeff == 0.0) continue;
        if (interior_row(ix, iy)) add(left, node, Complex(-coeff * inv_h, 0));
        if (interior_row(ix + 1, iy)) {
          add(right, node, Complex(coeff * inv_h, 0));
        }
      }
    }
  }
  // Horizontal edges between (ix, iy) and (ix, iy+1).
  for (int iy = 0; iy < n - 1; ++iy) {
    for (int ix = 1; ix < n - 1; ++ix) {
      const Point2 mid{grid.coord(ix), grid.coord(iy) + 0.5 * h};
      const EdgeCoefficients c = edge_coeffs(a, mid);
      const int bottom = grid.index(ix, iy);
      const int top = grid.index(ix, iy + 1);
      const std::pair<int, double> stencil[] = {
          {top, c.a22 * inv_h},
          {bottom, -c.a22 * inv_h},
          {grid.index(ix + 1, iy), c.a12 * inv_4h},
          {grid.index(ix + 1, iy + 1), c.a12 * inv_4h},
          {grid.index(ix - 1, iy), -c.a12 * inv_4h},
          {grid.index(ix - 1, iy + 1), -c.a12 * inv_4h},
      };
      for (const auto& [node, coeff] : stencil) {
        if (coeff == 0.0) continue;
        if (interior_row(ix, iy)) {
          add(bottom, node, Complex(-coeff * inv_h, 0));
        }
        if (interior_row(ix, iy + 1)) {
          add(top, node, Complex(coeff * inv_h, 0));
        }
      }
    }
  }
  // Shift on the diagonal of interior rows.
  if (sigma != Complex(0.0, 0.0)) {
    for (int iy = 1; iy < n - 1; ++iy) {
      for (int ix = 1; ix < n - 1; ++ix) {
        add(grid.index(ix, iy), grid.index(ix, iy), sigma);
      }
    }
  }

  // Closure rows.
  if (closure.kind == BoundaryClosure::Kind::dirichlet_zero) {
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        if (!grid.interior(ix, iy)) {
          add(grid.index(ix, iy), grid.index(ix, iy), Complex(1.0, 0.0));
        }
      }
    }
  } else {
    // du/dn approximated by the centered difference through the node one
    // step inward:  (u_b - u_{b+2d}) / (2 step) - beta(x_mid) u_{b+d} = 0,
    // with d the inward lattice direction (diagonal at corners) and
    // beta(x) = (x.n/|x|) mu_m(|x|).
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix) {
        if (grid.interior(ix, iy)) continue;
        const int dx = ix == 0 ? 1 : (ix == n - 1 ? -1 : 0);
        const int dy = iy == 0 ? 1 : (iy == n - 1 ? -1 : 0);
        const double step = (dx != 0 && dy != 0) ? h * std::sqrt(2.0) : h;
        const Point2 mid = grid.node(ix + dx, iy + dy);
        const double r = norm(mid);
        const Point2 nrm = unit(Point2{double(-dx), double(-dy)});
        const double obliquity = dot(unit(mid), nrm);
        const Complex mu =
            radiation_log_derivative(closure.k, closure.mode, r);
        const Complex beta = obliquity * mu;
        const int row = grid.index(ix, iy);
        add(row, row, Complex(0.5 / step, 0.0));
        add(row, grid.index(ix + 2 * dx, iy + 2 * dy),
            Complex(-0.5 / step, 0.0));
        add(row, grid.index(ix + dx, iy + dy), -beta);
      }
    }
  }

  AssembledSystem sys{grid, shift, closure,
                      sparse::CsrMatrix::from_triplets(
                          grid.size(), grid.size(), std::move(ti),
                          std::move(tj), std::move(tv))};
  return sys;
}

GridField solve(const AssembledSystem& system, const model::SourceTerm& f,
                sparse::SolveStats* stats, const SolveOptions& options) {
  GridField rhs(system.grid);
  const Grid& g = system.grid;
  for (int iy = 1; iy < g.n - 1; ++iy) {
    for (int ix = 1; ix < g.n - 1; ++ix) {
      rhs.at(ix, iy) = f(g.node(ix, iy));
    }
  }
  return solve_raw(system, rhs, stats, options);
}

GridField solve_raw(const AssembledSystem& system, const GridField& rhs,
                    sparse::SolveStats* stats, const SolveOptions& options,
                    const GridField* initial_guess) {
  const Grid& g = system.grid;
  if (rhs.grid() != g) {
    throw config_error("solve_raw: right-hand side grid mismatch");
  }
  std::vector<Complex> b = rhs.data();
  for (int iy = 0; iy < g.n; ++iy) {
    for (int ix = 0; ix < g.n; ++ix) {
      if (!g.interior(ix, iy)) b[g.index(ix, iy)] = Complex(0.0, 0.0);
    }
  }
  if (initial_guess != nullptr && initial_guess->grid() != g) {
    throw config_error("solve_raw: initial guess grid mismatch");
  }
  // Indefinite systems can destabilize a thresholded factorization; on a
  // breakdown or divergence, rebuild with a tighter threshold and more fill
  // (a fixed escalation path, so reruns stay deterministic).
  sparse::SolveStats st;
  SolveOptions attempt = options;
  for (int tries = 0;; ++tries) {
    std::vector<Complex> x;
    if (initial_guess != nullptr) x = initial_guess->data();
    try {
      sparse::IncompleteLU precon(system.matrix, attempt.ilu_tau,
                                  attempt.ilu_fill);
      st = sparse::bicgstab(system.matrix, precon, b, x, attempt.tol,
                            attempt.max_iter);
    } catch (const solver_error&) {
      if (tries >= 2) throw;
      attempt.ilu_tau /= 10.0;
      attempt.ilu_fill *= 2;
      continue;
    }
    if (stats != nullptr) *stats = st;
    GridField out(g, std::move(x));
    if (!out.all_finite()) {
      throw solver_error("solve_raw: non-finite entries in the solution");
    }
    return out;
  }
}

namespace {

Complex oracle_kernel(Point2 x, Point2 y, const model::SpectralShift& shift) {
  using model::ShiftKind;
  if (shift.kind() == ShiftKind::zero_energy_limit) {
    return Complex(kernels::log_green(x, y), 0.0);
  }
  return kernels::helmholtz_green(x, y, shift.wavenumber());
}

}  // namespace

std::vector<Complex> conv_oracle(const model::SourceTerm& f,
                                 const model::SpectralShift& shift,
                                 const std::vector<Point2>& eval_points,
                                 double quadrature_step) {
  const double s = f.support_radius;
  if (!(quadrature_step > 0.0)) {
    throw domain_error("conv_oracle: quadrature step must be positive");
  }
  const int nq = std::max(2, int(std::ceil(2.0 * s / quadrature_step)));
  const double hq = 2.0 * s / nq;
  // Cache the nonzero source samples once.
  std::vector<Point2> qp;
  std::vector<Complex> qw;
  qp.reserve(size_t(nq) * nq);
  for (int iy = 0; iy < nq; ++iy) {
    for (int ix = 0; ix < nq; ++ix) {
      const Point2 p{-s + (ix + 0.5) * hq, -s + (iy + 0.5) * hq};
      const Complex v = f(p);
      if (v != Complex(0.0, 0.0)) {
        qp.push_back(p);
        qw.push_back(v * (hq * hq));
      }
    }
  }
  std::vector<Complex> out(eval_points.size(), Complex(0.0, 0.0));
  parallel_for(eval_points.size(), [&](size_t i) {
    const Point2 x = eval_points[i];
    Complex acc(0.0, 0.0);
    for (size_t q = 0; q < qp.size(); ++q) {
      // A quadrature node landing exactly on the evaluation point would be
      // a removable (integrable) singularity; skip that cell.
      if (dist(x, qp[q]) < 1e-12 * hq) continue;
      acc += oracle_kernel(x, qp[q], shift) * qw[q];
    }
    out[i] = acc;
  });
  return out;
}

std::vector<Complex> conv_oracle(const model::Problem& problem,
                                 const model::SpectralShift& shift,
                                 const std::vector<Point2>& eval_points,
                                 double quadrature_step) {
  if (!problem.a.is_identity()) {
    throw oracle_misuse_error(
        "conv_oracle: problem '" + problem.name +
        "' has non-identity coefficients; the convolution oracle only "
        "applies to a == I");
  }
  return conv_oracle(problem.f, shift, eval_points, quadrature_step);
}

Complex discrete_ring_flux(const model::CoefficientField& a,
                           const GridField& u, int ring) {
  const Grid& g = u.grid();
  const int c = (g.n - 1) / 2;
  if (ring < 1 || c - ring < 1 || c + ring > g.n - 2) {
    throw domain_error("discrete_ring_flux: ring outside the interior");
  }
  const double h = g.spacing();
  const int lo = c - ring;
  const int hi = c + ring;
  Complex acc(0.0, 0.0);
  // Vertical edges crossing the right (outward +x) and left sides.
  for (int iy = lo; iy <= hi; ++iy) {
    for (const int side : {+1, -1}) {
      const int ix = side > 0 ? hi : lo - 1;  // edge between ix and ix+1
      const Point2 mid{g.coord(ix) + 0.5 * h, g.coord(iy)};
      const EdgeCoefficients cc = edge_coeffs(a, mid);
      const Complex du_n = (u.at(ix + 1, iy) - u.at(ix, iy)) / h;
      const Complex du_t = (u.at(ix, iy + 1) + u.at(ix + 1, iy + 1) -
                            u.at(ix, iy - 1) - u.at(ix + 1, iy - 1)) /
                           (4.0 * h);
      acc += double(side) * (cc.a11 * du_n + cc.a12 * du_t);
    }
  }
  // Horizontal edges crossing the top and bottom sides.
  for (int ix = lo; ix <= hi; ++ix) {
    for (const int side : {+1, -1}) {
      const int iy = side > 0 ? hi : lo - 1;
      const Point2 mid{g.coord(ix), g.coord(iy) + 0.5 * h};
      const EdgeCoefficients cc = edge_coeffs(a, mid);
      const Complex du_n = (u.at(ix, iy + 1) - u.at(ix, iy)) / h;
      const Complex du_t = (u.at(ix + 1, iy) + u.at(ix + 1, iy + 1) -
                            u.at(ix - 1, iy) - u.at(ix - 1, iy + 1)) /
                           (4.0 * h);
      acc += double(side) * (cc.a22 * du_n + cc.a12 * du_t);
    }
  }
  return acc * h;
}

}  // namespace lap2d::solver
