#pragma once

#include <complex>

#include "lap2d/geometry.hpp"

// Fundamental solutions of the 2-d Laplace and Helmholtz operators together
// with the complex-argument cylinder functions they are built from.
//
// All Helmholtz-type kernels take a wave number k with Im k >= 0, the branch
// on which the outgoing fundamental solution (i/4) H0(k r) decays (or, on the
// real axis, radiates).  Complex wave numbers arise from spectral shifts:
// the zero-energy shift i*eps corresponds to k = sqrt(eps) e^{3 pi i / 4}.

namespace lap2d::kernels {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 6.28318530717958647692;
// Euler-Mascheroni constant.
inline constexpr double euler_gamma = 0.57721566490153286061;

// Wave number restricted to the closed upper half plane, k != 0.
// Constructing one from anywhere else throws domain_error, so a WaveNumber
// in hand is a proof that the kernels below are on their decaying branch.
class WaveNumber {
 public:
  explicit WaveNumber(Complex value);
  Complex value() const { return value_; }

 private:
  Complex value_;
};

// k with k^2 = -i*eps and Im k > 0, i.e. sqrt(eps) e^{3 pi i/4}; eps > 0.
WaveNumber zero_energy_wavenumber(double eps);

// Principal square root of k^2 + i*eps (Im >= 0); k > 0, eps >= 0.
WaveNumber helmholtz_wavenumber(double k, double eps);

// ---------------------------------------------------------------------------
// Hankel functions of the first kind, orders 0 and 1, for complex argument
// with Re z > 0 (all kernel evaluations produce such arguments).  Ascending
// series for small |z|, Hankel's large-argument expansion beyond the
// crossover; the two branches agree to ~1e-9 on the overlap annulus.
Complex hankel1_0(Complex z);
Complex hankel1_1(Complex z);

// ---------------------------------------------------------------------------
// Kernels.

// Logarithmic potential kernel (1/2pi) ln(1/|x-y|); throws domain_error for
// coincident points.
double log_green(Point2 x, Point2 y);

// d/dN_s of the logarithmic kernel at a boundary point s with unit outward
// normal n: -(1/2pi) (s - x).n / |s - x|^2.
double log_green_normal_deriv(Point2 x, Point2 s, Point2 normal);

// Outgoing Helmholtz kernel (i/4) H0(k |x-y|).
Complex helmholtz_green(Point2 x, Point2 y, const WaveNumber& k);

// d/dN_s of the Helmholtz kernel: -(i k/4) H1(k |x-s|) (s - x).n / |x-s|.
Complex helmholtz_green_normal_deriv(Point2 x, Point2 s, Point2 normal,
                                     const WaveNumber& k);

// Kernel of (-Laplace + i eps)^{-1}: the Helmholtz kernel at the zero-energy
// wave number sqrt(eps) e^{3 pi i/4}; eps > 0.
Complex regularized_green(Point2 x, Point2 y, double eps);

// Additive constant splitting the regularized kernel from the logarithmic
// one: alpha(eps) = -(1/2pi)(ln(k_eps/2) + gamma) + i/4, so that
// regularized_green - alpha - log_green -> 0 as eps -> 0 at fixed distance.
// Re alpha = (1/4pi) ln(1/eps) + (ln 2 - gamma)/(2pi); Im alpha = -1/8.
Complex alpha(double eps);

// ---------------------------------------------------------------------------
// Implementation pieces, exposed for direct branch-overlap testing.
namespace detail {

// |z| at which the kernels switch from the ascending series to the
// large-argument expansion.
inline constexpr double branch_crossover = 12.0;

// J0, Y0, J1, Y1 by the ascending power series (one pass computes all four).
struct Cyl01 {
  Complex j0, y0, j1, y1;
};
Cyl01 cyl01_series(Complex z);

// H^(1)_nu, nu in {0, 1}, from the ascending series.
Complex hankel1_series(int nu, Complex z);

// H^(1)_nu, nu in {0, 1}, from Hankel's large-argument expansion; the
// divergent tail is truncated at its smallest term.
Complex hankel1_asymptotic(int nu, Complex z);

}  // namespace detail

}  // namespace lap2d::kernels
