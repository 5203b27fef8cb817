#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "lap2d/errors.hpp"
#include "lap2d/fd_solver.hpp"
#include "lap2d/grid.hpp"
#include "lap2d/problem_model.hpp"
#include "lap2d/special_functions.hpp"

using namespace lap2d;
using namespace lap2d::solver;
using model::Complex;
using model::SpectralShift;

namespace {

model::CoefficientField constant_field(model::Matrix2 m) {
  model::CoefficientField a;
  a.perturbation_radius = 0.25;
  a.entries = [m](Point2) { return m; };
  return a;
}

GridField sample(const Grid& g, const std::function<Complex(Point2)>& fn) {
  GridField out(g);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) out.at(ix, iy) = fn(g.node(ix, iy));
  return out;
}

double max_err(const GridField& u, const std::function<Complex(Point2)>& ref) {
  double worst = 0.0;
  const Grid& g = u.grid();
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      worst = std::max(worst, std::abs(u.at(ix, iy) - ref(g.node(ix, iy))));
  return worst;
}

}  // namespace

TEST_CASE("stencil is exact on quadratics for constant coefficients") {
  // u = scale (1 + 0.5 x - 0.25 y + 2 x^2 + x y - 1.5 y^2) and constant
  // a = [[2, 0.5], [0.5, 1.5]] give
  //   -div(a grad u) = -(a11 u_xx + 2 a12 u_xy + a22 u_yy) = -4.5 scale
  // exactly; edge-midpoint fluxes and centered differences reproduce this
  // without discretization error.
  const Grid grid(2.0, 65);
  const Complex scale(1.0, 0.5);
  const auto exact = [&](Point2 p) {
    return scale * (1.0 + 0.5 * p.x - 0.25 * p.y + 2.0 * p.x * p.x +
                    p.x * p.y - 1.5 * p.y * p.y);
  };
  const model::CoefficientField a = constant_field({2.0, 0.5, 1.5});
  const SpectralShift shift = SpectralShift::zero_energy(0.37);
  const AssembledSystem sys =
      assemble(a, shift, grid, BoundaryClosure::dirichlet());

  std::vector<Complex> au;
  sys.matrix.multiply(sample(grid, exact).data(), au);
  double worst = 0.0;
  for (int iy = 1; iy < grid.n - 1; ++iy) {
    for (int ix = 1; ix < grid.n - 1; ++ix) {
      const Complex want =
          -4.5 * scale + shift.sigma() * exact(grid.node(ix, iy));
      worst = std::max(worst,
                       std::abs(au[grid.index(ix, iy)] - want));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("identity coefficients reduce to the five-point stencil") {
  const Grid grid(2.0, 65);
  const double h = grid.spacing();
  const AssembledSystem sys =
      assemble(constant_field(model::identity_matrix()),
               SpectralShift::zero_energy_limit(), grid,
               BoundaryClosure::dirichlet());
  const int c = (grid.n - 1) / 2;
  const int row = grid.index(c, c);
  const auto& ptr = sys.matrix.row_ptr();
  const auto& col = sys.matrix.col();
  const auto& val = sys.matrix.val();
  CHECK(ptr[row + 1] - ptr[row] == 5);
  for (int p = ptr[row]; p < ptr[row + 1]; ++p) {
    const double want = col[p] == row ? 4.0 / (h * h) : -1.0 / (h * h);
    CHECK(std::abs(val[p] - Complex(want, 0.0)) < 1e-12 / (h * h));
  }
}

TEST_CASE("manufactured solution converges at second order for both shift "
          "families") {
  // Exact solution (1 - r^2)^5 inside the unit disc, zero outside: a C^4
  // function whose Dirichlet data on the B_2 box is exactly zero, so the
  // measured error is pure discretization and the 5-point scheme keeps its
  // clean second-order rate.
  const auto exact = [](Point2 p) {
    const double r2 = p.x * p.x + p.y * p.y;
    if (r2 >= 1.0) return Complex(0.0, 0.0);
    const double s = 1.0 - r2;
    return Complex(s * s * s * s * s, 0.0);
  };
  for (const SpectralShift& shift :
       {SpectralShift::zero_energy(0.37), SpectralShift::helmholtz(1.0, 0.5)}) {
    CAPTURE(shift.describe());
    model::SourceTerm f;
    f.support_radius = 1.0;
    f.values = [&](Point2 p) {
      const double r2 = p.x * p.x + p.y * p.y;
      if (r2 >= 1.0) return Complex(0.0, 0.0);
      const double s = 1.0 - r2;
      const double s3 = s * s * s;
      // -Delta (1-r^2)^5 = 20 s^4 - 80 r^2 s^3
      return Complex(20.0 * s * s3 - 80.0 * r2 * s3, 0.0) +
             shift.sigma() * Complex(s * s * s3, 0.0);
    };
    std::vector<double> errs;
    for (const int n : {65, 129, 257}) {
      const Grid grid(2.0, n);
      const AssembledSystem sys =
          assemble(constant_field(model::identity_matrix()), shift, grid,
                   BoundaryClosure::dirichlet());
      errs.push_back(max_err(solve(sys, f), exact));
    }
    CHECK(errs[0] / errs[1] >= 3.5);
    CHECK(errs[1] / errs[2] >= 3.5);
  }
}

TEST_CASE("log-kernel oracle matches the exterior point-mass potential") {
  // The logarithmic potential of a radial unit-mass source equals the
  // potential of a point mass at the origin outside the support.
  model::SourceTerm f;
  f.support_radius = 0.5;
  f.values = [](Point2 p) {
    return Complex(model::unit_mass_bump(norm(p), 0.5), 0.0);
  };
  const std::vector<Point2> pts = {{1.7, 0.6}, {-0.9, 0.4}, {0.0, -2.5}};
  const std::vector<Complex> got =
      conv_oracle(f, SpectralShift::zero_energy_limit(), pts, 0.005);
  for (size_t i = 0; i < pts.size(); ++i) {
    const Complex want(kernels::log_green(pts[i], {0.0, 0.0}), 0.0);
    CHECK(std::abs(got[i] - want) < 1e-6);
  }
}

TEST_CASE("oracle refuses non-identity coefficients") {
  const std::vector<Point2> pts = {{1.5, 0.0}};
  CHECK_THROWS_AS(conv_oracle(model::find_problem("bump-dipole"),
                              SpectralShift::zero_energy(1e-2), pts, 0.05),
                  oracle_misuse_error);
  CHECK_NOTHROW(conv_oracle(model::find_problem("identity-dipole"),
                            SpectralShift::zero_energy(1e-2), pts, 0.05));
}

TEST_CASE("solve with radiation closure tracks the free-space oracle") {
  // Strong damping (eps = 2) confines the field well inside B_4, so the
  // n = 65 solution should match the free-space convolution to a few h^2.
  const model::Problem& prob = model::find_problem("identity-dipole");
  const SpectralShift shift = SpectralShift::helmholtz(1.0, 2.0);
  const Grid grid(4.0, 65);
  const AssembledSystem sys =
      assemble(prob.a, shift, grid,
               BoundaryClosure::robin(shift.wavenumber().value(), 1));
  const GridField u = solve(sys, prob.f);
  const std::vector<Point2> pts = {
      {0.0, 0.0}, {0.75, 0.25}, {-1.25, 0.5}, {1.5, -1.5}};
  const std::vector<Complex> ref = conv_oracle(prob, shift, pts, 0.01);
  double scale = 0.0;
  for (const Complex& v : ref) scale = std::max(scale, std::abs(v));
  for (size_t i = 0; i < pts.size(); ++i) {
    CHECK(std::abs(u.interpolate(pts[i]) - ref[i]) < 0.02 * scale);
  }
}

TEST_CASE("discrete flux identity holds for a solved variable-coefficient "
          "system") {
  const model::Problem& prob = model::find_problem("anisotropic-dipole");
  const SpectralShift shift = SpectralShift::zero_energy(0.1);
  const Grid grid(4.0, 65);
  const AssembledSystem sys =
      assemble(prob.a, shift, grid, BoundaryClosure::dirichlet());
  const GridField u = solve(sys, prob.f);
  const double h = grid.spacing();
  const int c = (grid.n - 1) / 2;
  for (const int ring : {5, 12, 25}) {
    Complex balance(0.0, 0.0);
    for (int iy = c - ring; iy <= c + ring; ++iy) {
      for (int ix = c - ring; ix <= c + ring; ++ix) {
        balance += shift.sigma() * u.at(ix, iy) - prob.f(grid.node(ix, iy));
      }
    }
    balance *= h * h;
    const Complex flux = discrete_ring_flux(prob.a, u, ring);
    CHECK(std::abs(flux - balance) < 1e-8);
  }
  CHECK_THROWS_AS(discrete_ring_flux(prob.a, u, 0), domain_error);
  CHECK_THROWS_AS(discrete_ring_flux(prob.a, u, c), domain_error);
}

TEST_CASE("zero source yields the zero field") {
  model::SourceTerm f;
  f.support_radius = 0.5;
  f.values = [](Point2) { return Complex(0.0, 0.0); };
  const Grid grid(4.0, 65);
  const AssembledSystem sys =
      assemble(constant_field(model::identity_matrix()),
               SpectralShift::zero_energy(1e-2), grid,
               BoundaryClosure::dirichlet());
  const GridField u = solve(sys, f);
  for (const Complex& v : u.data()) CHECK(v == Complex(0.0, 0.0));
}

TEST_CASE("warm start accepts a converged iterate") {
  const model::Problem& prob = model::find_problem("identity-dipole");
  const Grid grid(4.0, 65);
  const AssembledSystem sys =
      assemble(prob.a, SpectralShift::zero_energy(0.1), grid,
               BoundaryClosure::dirichlet());
  sparse::SolveStats cold;
  const GridField u = solve(sys, prob.f, &cold);

  GridField rhs(grid);
  for (int iy = 1; iy < grid.n - 1; ++iy)
    for (int ix = 1; ix < grid.n - 1; ++ix)
      rhs.at(ix, iy) = prob.f(grid.node(ix, iy));
  sparse::SolveStats warm;
  solve_raw(sys, rhs, &warm, {}, &u);
  CHECK(warm.iterations <= cold.iterations);
  CHECK(warm.iterations <= 2);

  const GridField wrong_grid(Grid(4.0, 129));
  CHECK_THROWS_AS(solve_raw(sys, wrong_grid), config_error);
  CHECK_THROWS_AS(solve_raw(sys, rhs, nullptr, {}, &wrong_grid), config_error);
}

TEST_CASE("closure guards reject unusable parameters") {
  CHECK_THROWS_AS(BoundaryClosure::robin(Complex(0, 0), 0), domain_error);
  CHECK_THROWS_AS(BoundaryClosure::robin(Complex(1, -0.1), 1), domain_error);
  CHECK_THROWS_AS(BoundaryClosure::robin(Complex(1, 0), 2), domain_error);
  CHECK_NOTHROW(BoundaryClosure::robin(Complex(0, 0), 1));

  CHECK_THROWS_AS(radiation_log_derivative(Complex(1, 0), 0, -1.0),
                  domain_error);
  CHECK_THROWS_AS(radiation_log_derivative(Complex(0, 0), 0, 1.0),
                  domain_error);
  // Static limit: d/dr ln(r^-1) = -1/r.
  CHECK(std::abs(radiation_log_derivative(Complex(0, 0), 1, 2.5) -
                 Complex(-0.4, 0.0)) < 1e-15);
  // Large kr: mu_0 ~ ik - 1/(2r).
  const Complex mu = radiation_log_derivative(Complex(1, 0), 0, 100.0);
  CHECK(std::abs(mu - Complex(-1.0 / 200.0, 1.0)) < 1e-4);
}

TEST_CASE("assemble guards reject bad geometry and degenerate coefficients") {
  const Grid small(2.0, 65);
  model::CoefficientField wide = constant_field(model::identity_matrix());
  wide.perturbation_radius = 1.0;
  CHECK_THROWS_AS(assemble(wide, SpectralShift::zero_energy_limit(), small,
                           BoundaryClosure::dirichlet()),
                  config_error);

  model::CoefficientField degenerate;
  degenerate.perturbation_radius = 0.25;
  degenerate.entries = [](Point2 p) {
    // loses positivity near (1, 0)
    const double s = std::abs(p.x - 1.0) < 0.2 ? 0.0 : 1.0;
    return model::Matrix2{s, 0.0, s};
  };
  CHECK_THROWS_AS(assemble(degenerate, SpectralShift::zero_energy_limit(),
                           small, BoundaryClosure::dirichlet()),
                  solver_error);
}
