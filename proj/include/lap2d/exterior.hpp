#pragma once

#include <string>
#include <vector>

#include "lap2d/grid.hpp"
#include "lap2d/problem_model.hpp"

// Cauchy data on circles and the exterior boundary-integral representation
//
//   u(x) = -int_{S_R} [ g(x,s) u_N(s) - g_N(x,s) u(s) ] ds,   |x| > R,
//
// with the outward normal and the kernel g matching the spectral shift.
// Evaluating the representation of a trace taken from a grid solution
// reproduces the field outside the circle; it is also the clean way to
// probe far-field behaviour, since contributions that are regular inside
// the circle (e.g. reflections from the truncation boundary) integrate to
// zero exactly.

namespace lap2d::boundary {

using model::Complex;

struct BoundaryTrace {
  double radius = 0.0;
  std::vector<double> angles;         // m uniform samples, 2*pi*i/m
  std::vector<Complex> values;        // u(s)
  std::vector<Complex> normal_derivs; // du/dN, outward normal

  int samples() const { return int(angles.size()); }
};

// Samples u and its outward radial derivative on the circle of the given
// radius: values by bicubic interpolation, derivatives by a 4-point
// one-sided stencil reaching 2h outward.  Requires radius + 2h <= L and
// m >= 64 even.
BoundaryTrace trace_on_circle(const GridField& field, double radius, int m);

// Total outward flux  int_{S_R} u_N ds  by the periodic trapezoid rule.
Complex flux(const BoundaryTrace& trace);

// flux at several radii (constant across radii for fields solving the
// homogeneous zero-shift equation in the annulus).
std::vector<Complex> flux_conservation(const GridField& field,
                                       const std::vector<double>& radii,
                                       int m);

// The representation formula above at an exterior point.  The kernel is
// selected by the shift: logarithmic for the zero-energy limit, regularized
// for the zero-energy shift, Hankel for the Helmholtz shifts.
Complex exterior_eval(const BoundaryTrace& trace, Point2 x,
                      const model::SpectralShift& shift);

// Radiation-condition defect  int_{S_r} |du/dr - i k u|^2 ds  per radius.
std::vector<double> radiation_residual(const GridField& field, double k,
                                       const std::vector<double>& radii,
                                       int m);

// CSV export: `# radius=<r> m=<m>` header line, then
// angle,u_re,u_im,uN_re,uN_im rows.
void write_trace_csv(const BoundaryTrace& trace, const std::string& path);

}  // namespace lap2d::boundary
