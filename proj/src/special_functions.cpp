#include "lap2d/special_functions.hpp"

#include <cmath>

#include "lap2d/errors.hpp"

namespace lap2d::kernels {

namespace {

bool finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Guard against silent NaN/Inf escaping a kernel evaluation.
Complex checked(Complex z, const char* what) {
  if (!finite(z)) {
    throw domain_error(std::string(what) + ": evaluation is not finite");
  }
  return z;
}

}  // namespace

WaveNumber::WaveNumber(Complex value) : value_(value) {
  if (!finite(value) || value == Complex(0.0, 0.0)) {
    throw domain_error("WaveNumber: k must be finite and nonzero");
  }
  if (value.imag() < 0.0) {
    throw domain_error("WaveNumber: Im k < 0 selects the growing branch");
  }
}

WaveNumber zero_energy_wavenumber(double eps) {
  if (!(eps > 0.0)) {
    throw domain_error("zero_energy_wavenumber: eps must be positive");
  }
  // sqrt(eps) e^{3 pi i/4}: the root of k^2 = -i eps in the upper half plane.
  const double r = std::sqrt(eps);
  return WaveNumber(Complex(-r * std::sqrt(0.5), r * std::sqrt(0.5)));
}

WaveNumber helmholtz_wavenumber(double k, double eps) {
  if (!(k > 0.0) || eps < 0.0) {
    throw domain_error("helmholtz_wavenumber: need k > 0 and eps >= 0");
  }
  // Principal root of k^2 + i eps lies in the first quadrant.
  return WaveNumber(std::sqrt(Complex(k * k, eps)));
}

// ---------------------------------------------------------------------------
// Cylinder functions.

namespace detail {

Cyl01 cyl01_series(Complex z) {
  // Ascending series (q = z^2/4, H_m the harmonic numbers):
  //   J0 = sum c_m,                c_m = (-q)^m / (m!)^2
  //   Y0 = (2/pi)[(ln(z/2)+gamma) J0 - sum_{m>=1} c_m H_m]
  //   J1 = (z/2) sum d_m,          d_m = (-q)^m / (m! (m+1)!)
  //   Y1 = (2/pi)(ln(z/2)+gamma) J1 - 2/(pi z)
  //        - (z/2pi) sum d_m (H_m + H_{m+1})
  const Complex q = 0.25 * z * z;
  Complex c(1.0, 0.0);   // c_m
  Complex d(1.0, 0.0);   // d_m
  Complex j0 = c;
  Complex s0(0.0, 0.0);  // sum c_m H_m
  Complex j1s = d;       // sum d_m
  Complex s1 = d;        // sum d_m (H_m + H_{m+1}); H_0 + H_1 = 1
  double harmonic = 0.0;
  // The terms eventually decay factorially; track the largest partial term
  // so the stopping test survives the cancellation regime |z| >> 1.
  double scale = 1.0;
  for (int m = 1; m <= 200; ++m) {
    c *= -q / double(m * m);
    d *= -q / double(m * (m + 1));
    harmonic += 1.0 / m;
    j0 += c;
    s0 += harmonic * c;
    j1s += d;
    s1 += (2.0 * harmonic + 1.0 / (m + 1)) * d;
    const double mag = std::abs(c) * (harmonic + 1.0);
    scale = std::max(scale, mag);
    if (mag < 1e-20 * scale && m > 4) break;
  }
  const Complex lg = std::log(0.5 * z) + euler_gamma;
  Cyl01 out;
  out.j0 = j0;
  out.y0 = (2.0 / pi) * (lg * j0 - s0);
  out.j1 = 0.5 * z * j1s;
  out.y1 = (2.0 / pi) * lg * out.j1 - 2.0 / (pi * z) - (0.5 * z / pi) * s1;
  return out;
}

Complex hankel1_series(int nu, Complex z) {
  const Cyl01 c = cyl01_series(z);
  const Complex i(0.0, 1.0);
  return nu == 0 ? c.j0 + i * c.y0 : c.j1 + i * c.y1;
}

Complex hankel1_asymptotic(int nu, Complex z) {
  // H_nu(z) ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} sum_k a_k (i/z)^k,
  //   a_0 = 1,  a_k = a_{k-1} (4 nu^2 - (2k-1)^2) / (8 k).
  // The series is divergent; sum to the smallest term (~16 terms suffice
  // beyond |z| = 12 for ~1e-10 truncation error).
  const double fournu2 = 4.0 * nu * nu;
  const Complex iz = Complex(0.0, 1.0) / z;
  Complex term(1.0, 0.0);
  Complex sum = term;
  double last = 1.0;
  for (int k = 1; k <= 24; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (fournu2 - odd * odd) / (8.0 * k) * iz;
    const double mag = std::abs(term);
    if (mag > last) break;  // divergent tail reached
    sum += term;
    last = mag;
    if (mag < 1e-18 * std::abs(sum)) break;
  }
  const double phase_shift = 0.5 * nu * pi + 0.25 * pi;
  const Complex amp = std::sqrt(2.0 / (pi * z));
  return amp * std::exp(Complex(0.0, 1.0) * (z - phase_shift)) * sum;
}

}  // namespace detail

namespace {

Complex hankel1(int nu, Complex z) {
  if (z == Complex(0.0, 0.0) || !finite(z)) {
    throw domain_error("hankel1: argument must be finite and nonzero");
  }
  if (z.imag() < 0.0) {
    throw domain_error("hankel1: Im z < 0 is outside the decaying branch");
  }
  const Complex h = std::abs(z) <= detail::branch_crossover
                        ? detail::hankel1_series(nu, z)
                        : detail::hankel1_asymptotic(nu, z);
  return checked(h, "hankel1");
}

}  // namespace

Complex hankel1_0(Complex z) { return hankel1(0, z); }
Complex hankel1_1(Complex z) { return hankel1(1, z); }

// ---------------------------------------------------------------------------
// Kernels.

double log_green(Point2 x, Point2 y) {
  const double r = dist(x, y);
  if (r == 0.0) {
    throw domain_error("log_green: coincident points");
  }
  return -std::log(r) / two_pi;
}

double log_green_normal_deriv(Point2 x, Point2 s, Point2 normal) {
  const double r = dist(x, s);
  if (r == 0.0) {
    throw domain_error("log_green_normal_deriv: coincident points");
  }
  return -dot(s - x, normal) / (two_pi * r * r);
}

Complex helmholtz_green(Point2 x, Point2 y, const WaveNumber& k) {
  const double r = dist(x, y);
  if (r == 0.0) {
    throw domain_error("helmholtz_green: coincident points");
  }
  return Complex(0.0, 0.25) * hankel1_0(k.value() * r);
}

Complex helmholtz_green_normal_deriv(Point2 x, Point2 s, Point2 normal,
                                     const WaveNumber& k) {
  const double r = dist(x, s);
  if (r == 0.0) {
    throw domain_error("helmholtz_green_normal_deriv: coincident points");
  }
  // d/dr of (i/4) H0(k r) is -(i k/4) H1(k r); the normal picks up the
  // direction cosine (s - x).n / r.
  const Complex radial = Complex(0.0, -0.25) * k.value() *
                         hankel1_1(k.value() * r);
  return radial * (dot(s - x, normal) / r);
}

Complex regularized_green(Point2 x, Point2 y, double eps) {
  return helmholtz_green(x, y, zero_energy_wavenumber(eps));
}

Complex alpha(double eps) {
  const WaveNumber k = zero_energy_wavenumber(eps);
  return -(std::log(0.5 * k.value()) + euler_gamma) / two_pi +
         Complex(0.0, 0.25);
}

}  // namespace lap2d::kernels
