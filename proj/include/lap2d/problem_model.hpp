#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "lap2d/geometry.hpp"
#include "lap2d/special_functions.hpp"

// Problem data for the perturbed-Laplacian equation
//
//     -div(a(x) grad u) + sigma u = f,        x in R^2,
//
// with a symmetric, uniformly elliptic, equal to the identity outside a
// compact perturbation disk, and f compactly supported.  The spectral shift
// sigma selects the regularization family: i*eps (zero-energy), -(k^2+i*eps)
// (Helmholtz), or their eps -> 0 limits.

namespace lap2d::model {

using Complex = std::complex<double>;

// Symmetric 2x2 coefficient matrix; a21 == a12 by construction.
struct Matrix2 {
  double a11 = 1.0;
  double a12 = 0.0;
  double a22 = 1.0;

  // Eigenvalue range of the symmetric matrix.
  double eig_min() const;
  double eig_max() const;
};

inline Matrix2 identity_matrix() { return {1.0, 0.0, 1.0}; }

// Coefficient field a(x).  Outside |x| > perturbation_radius the field must
// be the identity; validate_coefficients enforces this on a sample lattice.
struct CoefficientField {
  std::function<Matrix2(Point2)> entries;
  double perturbation_radius = 1.0;
  // Rough Lipschitz constant of x -> a(x), used only for reporting.
  double lipschitz_hint = 0.0;

  Matrix2 operator()(Point2 p) const { return entries(p); }
  bool is_identity() const;  // exact identity everywhere (catalog flag)
};

// Compactly supported source; values(x) == 0 for |x| > support_radius.
struct SourceTerm {
  std::function<Complex(Point2)> values;
  double support_radius = 1.0;

  Complex operator()(Point2 p) const { return values(p); }
};

// ---------------------------------------------------------------------------
// Spectral shifts.

enum class ShiftKind {
  zero_energy_regularized,  // sigma = i eps, eps > 0
  zero_energy_limit,        // sigma = 0 (limit object of the family above)
  helmholtz_regularized,    // sigma = -(k^2 + i eps), k > 0, eps > 0
  helmholtz_limit,          // sigma = -k^2, k > 0
};

class SpectralShift {
 public:
  static SpectralShift zero_energy(double eps);          // eps > 0
  static SpectralShift zero_energy_limit();
  static SpectralShift helmholtz(double k, double eps);  // k > 0, eps > 0
  static SpectralShift helmholtz_limit(double k);        // k > 0

  ShiftKind kind() const { return kind_; }
  double eps() const { return eps_; }
  double k() const { return k_; }

  // The constant added to the (positive) divergence-form operator.
  Complex sigma() const;

  // Wave number of the matching constant-coefficient kernel
  // (i/4) H0(k |x|); throws domain_error for the zero-energy limit, whose
  // kernel is logarithmic.
  kernels::WaveNumber wavenumber() const;

  // True for the two kinds with eps > 0.
  bool regularized() const;

  std::string describe() const;

 private:
  SpectralShift(ShiftKind kind, double eps, double k);
  ShiftKind kind_;
  double eps_ = 0.0;
  double k_ = 0.0;
};

// ---------------------------------------------------------------------------
// Validation and quadrature.

// Uniform sample lattice used by coefficient validation.
struct SampleLattice {
  double half_width = 2.0;
  int per_side = 201;
};

// Samples a(x) on the lattice and returns the observed ellipticity interval
// {min eigenvalue, max eigenvalue}.  Throws domain_error if the field fails
// positivity, or is not the identity outside the perturbation radius.
std::pair<double, double> validate_coefficients(const CoefficientField& a,
                                                const SampleLattice& lattice);

// Midpoint-rule integral of f over its support square; step is adjusted to
// divide the square evenly.
Complex source_mean(const SourceTerm& f, double quadrature_step);

// ---------------------------------------------------------------------------
// Built-in problem catalog.

struct Problem {
  std::string name;
  std::string description;
  CoefficientField a;
  SourceTerm f;
  bool zero_mean = false;  // integral of f vanishes analytically
};

const std::vector<Problem>& builtin_problems();

// Lookup by catalog name; throws config_error for unknown names.
const Problem& find_problem(const std::string& name);

// C^2 radial profile (1 - r^2/rho^2)^3 on r < rho, 0 outside.
double cubic_bump(double r, double rho);

// C^1 radial bump with unit integral over R^2:
// (3 / (pi rho^2)) (1 - r^2/rho^2)^2 on r < rho.
double unit_mass_bump(double r, double rho);

}  // namespace lap2d::model
