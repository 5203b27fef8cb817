#include "lap2d/exterior.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include "lap2d/errors.hpp"
#include "lap2d/special_functions.hpp"

namespace lap2d::boundary {

using kernels::two_pi;

BoundaryTrace trace_on_circle(const GridField& field, double radius, int m) {
  const Grid& g = field.grid();
  const double h = g.spacing();
  if (!(radius > 0.0) || radius + 2.0 * h > g.half_width) {
    throw domain_error(
        "trace_on_circle: need 0 < radius <= L - 2h (the one-sided radial "
        "stencil reaches 2h outward)");
  }
  if (m < 64 || m % 2 != 0) {
    throw domain_error("trace_on_circle: need an even sample count >= 64");
  }
  BoundaryTrace tr;
  tr.radius = radius;
  tr.angles.resize(m);
  tr.values.resize(m);
  tr.normal_derivs.resize(m);
  // One-sided 4-point derivative at offsets {0, d, 2d, 3d} with d = 2h/3:
  // f'(0) = (-11 f0 + 18 f1 - 9 f2 + 2 f3) / (6 d), exact for cubics.
  const double d = 2.0 * h / 3.0;
  for (int i = 0; i < m; ++i) {
    const double phi = two_pi * i / m;
    tr.angles[i] = phi;
    const Point2 dir = from_polar(1.0, phi);
    const Complex f0 = field.interpolate(radius * dir);
    const Complex f1 = field.interpolate((radius + d) * dir);
    const Complex f2 = field.interpolate((radius + 2.0 * d) * dir);
    const Complex f3 = field.interpolate((radius + 3.0 * d) * dir);
    tr.values[i] = f0;
    tr.normal_derivs[i] =
        (-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / (6.0 * d);
  }
  return tr;
}

Complex flux(const BoundaryTrace& trace) {
  Complex acc(0.0, 0.0);
  for (const Complex& un : trace.normal_derivs) acc += un;
  return acc * (trace.radius * two_pi / double(trace.samples()));
}

std::vector<Complex> flux_conservation(const GridField& field,
                                       const std::vector<double>& radii,
                                       int m) {
  std::vector<Complex> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(flux(trace_on_circle(field, r, m)));
  return out;
}

Complex exterior_eval(const BoundaryTrace& trace, Point2 x,
                      const model::SpectralShift& shift) {
  if (norm(x) <= trace.radius) {
    throw domain_error("exterior_eval: point inside the trace circle");
  }
  const bool log_kernel =
      shift.kind() == model::ShiftKind::zero_energy_limit;
  // The wave number is fixed per call; fetch it once outside the loop.
  const auto k = log_kernel ? std::optional<kernels::WaveNumber>{}
                            : std::optional{shift.wavenumber()};
  const int m = trace.samples();
  Complex acc(0.0, 0.0);
  for (int i = 0; i < m; ++i) {
    const Point2 s = from_polar(trace.radius, trace.angles[i]);
    const Point2 nrm = unit(s);  // outward
    Complex g, gn;
    if (log_kernel) {
      g = Complex(kernels::log_green(x, s), 0.0);
      gn = Complex(kernels::log_green_normal_deriv(x, s, nrm), 0.0);
    } else {
      g = kernels::helmholtz_green(x, s, *k);
      gn = kernels::helmholtz_green_normal_deriv(x, s, nrm, *k);
    }
    acc += g * trace.normal_derivs[i] - gn * trace.values[i];
  }
  return -acc * (trace.radius * two_pi / double(m));
}

std::vector<double> radiation_residual(const GridField& field, double k,
                                       const std::vector<double>& radii,
                                       int m) {
  if (!(k > 0.0)) {
    throw domain_error("radiation_residual: k must be positive");
  }
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    const BoundaryTrace tr = trace_on_circle(field, r, m);
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      acc += std::norm(tr.normal_derivs[i] -
                       Complex(0.0, k) * tr.values[i]);
    }
    out.push_back(acc * (r * two_pi / double(m)));
  }
  return out;
}

void write_trace_csv(const BoundaryTrace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw config_error("write_trace_csv: cannot open " + path);
  os.precision(17);
  os << "# radius=" << trace.radius << " m=" << trace.samples() << '\n';
  os << "angle,u_re,u_im,uN_re,uN_im\n";
  for (int i = 0; i < trace.samples(); ++i) {
    os << trace.angles[i] << ',' << trace.values[i].real() << ','
       << trace.values[i].imag() << ',' << trace.normal_derivs[i].real()
       << ',' << trace.normal_derivs[i].imag() << '\n';
  }
}

}  // namespace lap2d::boundary
