#pragma once

#include <optional>
#include <vector>

#include "lap2d/grid.hpp"
#include "lap2d/problem_model.hpp"
#include "lap2d/sparse.hpp"

// Finite-difference discretization of  L u + sigma u = f,
// L = -div(a grad .), on the truncated square, with a flux-conservative
// stencil: the flux a.grad(u) is evaluated at cell-edge midpoints, the
// off-diagonal coefficient entering through centered transverse
// differences.  For a == I the interior stencil is the classical 5-point
// Laplacian; the discrete flux identity (integral of f balancing the
// boundary flux plus the shift term) holds to solver tolerance.

namespace lap2d::solver {

using model::Complex;

// Truncation-boundary closure.  dirichlet_zero pins the field to zero; the
// radiation closure imposes the outgoing-wave condition
//
//    du/dn - (x.n/|x|) mu_m(|x|) u = 0,
//
// where mu_m(r) = k H_m'(k r) / H_m(k r) is the exact logarithmic radial
// derivative of the outgoing cylinder mode of angular index m.  For
// k r >> 1 this reduces to the familiar du/dn - (ik - 1/(2r)) u = 0; for
// k -> 0 and m >= 1 it degenerates to the static decay du/dr + m u / r = 0.
// The closure wave number may be complex (Im k >= 0), matching the
// regularized shifts.
struct BoundaryClosure {
  enum class Kind { dirichlet_zero, robin_radiation };

  Kind kind = Kind::dirichlet_zero;
  Complex k = Complex(0.0, 0.0);  // closure wave number for robin_radiation
  int mode = 0;                   // angular index of the absorbed channel

  static BoundaryClosure dirichlet();
  // mode in {0, 1}; k == 0 is allowed only for mode 1 (static limit).
  static BoundaryClosure robin(Complex k, int mode);
};

// Exact logarithmic derivative mu_m(r) = k H_m'(k r)/H_m(k r) of the
// outgoing mode, with the k == 0 limit -m/r; modes 0 and 1 only.
Complex radiation_log_derivative(Complex k, int mode, double r);

struct AssembledSystem {
  Grid grid;
  model::SpectralShift shift;
  BoundaryClosure closure;
  sparse::CsrMatrix matrix;
};

// Builds the sparse system for the given coefficients, shift, and closure.
// Throws solver_error if the coefficient matrix degenerates at any sampled
// edge midpoint (singular stencil).
AssembledSystem assemble(const model::CoefficientField& a,
                         const model::SpectralShift& shift, const Grid& grid,
                         const BoundaryClosure& closure);

struct SolveOptions {
  double tol = 1e-10;    // relative residual target
  int max_iter = 20000;
  double ilu_tau = 3e-4;  // preconditioner drop threshold
  int ilu_fill = 30;      // preconditioner fill cap per row and part
};

// Solve with f sampled at the grid nodes.
GridField solve(const AssembledSystem& system, const model::SourceTerm& f,
                sparse::SolveStats* stats = nullptr,
                const SolveOptions& options = {});

// Solve with an arbitrary right-hand-side field (boundary entries are
// replaced by the closure's zero data).  initial_guess, when given, warm
// starts the iteration (useful along parameter ladders).
GridField solve_raw(const AssembledSystem& system, const GridField& rhs,
                    sparse::SolveStats* stats = nullptr,
                    const SolveOptions& options = {},
                    const GridField* initial_guess = nullptr);

// Brute-force constant-coefficient oracle
//     u(x) = integral of g(x, y; shift) f(y) dy
// by midpoint quadrature over the support square; g is the logarithmic,
// regularized, or Helmholtz kernel according to the shift.  This is the
// independent reference for solve() when a == I.
std::vector<Complex> conv_oracle(const model::SourceTerm& f,
                                 const model::SpectralShift& shift,
                                 const std::vector<Point2>& eval_points,
                                 double quadrature_step);

// Guarded variant: refuses problems whose coefficients are not the
// identity (the oracle would silently be wrong for them).
std::vector<Complex> conv_oracle(const model::Problem& problem,
                                 const model::SpectralShift& shift,
                                 const std::vector<Point2>& eval_points,
                                 double quadrature_step);

// Net outward flux of a.grad(u) through the square contour of cell edges
// enclosing the node block [c-ring, c+ring]^2 around the center node c.
// Uses the same edge-midpoint flux formula as assemble(), so for a solved
// system
//     ring_flux = h^2 * sum over the block of (sigma u - f)
// holds to solver tolerance (discrete conservation; for a point source of
// unit mass and sigma = 0 the value is -1, matching the continuum
// divergence theorem for -div(a grad u) = f).
Complex discrete_ring_flux(const model::CoefficientField& a,
                           const GridField& u, int ring);

}  // namespace lap2d::solver
