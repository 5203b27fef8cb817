#include "lap2d/problem_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lap2d/errors.hpp"

namespace lap2d::model {

double Matrix2::eig_min() const {
  const double mean = 0.5 * (a11 + a22);
  const double dev = std::hypot(0.5 * (a11 - a22), a12);
  return mean - dev;
}

double Matrix2::eig_max() const {
  const double mean = 0.5 * (a11 + a22);
  const double dev = std::hypot(0.5 * (a11 - a22), a12);
  return mean + dev;
}

bool CoefficientField::is_identity() const {
  // Catalog fields tag themselves by sampling: identity fields return I
  // everywhere, including inside the perturbation radius.
  for (double r : {0.0, 0.3, 0.55, 0.8, 1.2}) {
    for (double phi : {0.1, 1.7, 3.9}) {
      const Matrix2 m = entries(from_polar(r, phi));
      if (std::abs(m.a11 - 1.0) > 1e-14 || std::abs(m.a12) > 1e-14 ||
          std::abs(m.a22 - 1.0) > 1e-14) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// SpectralShift.

SpectralShift::SpectralShift(ShiftKind kind, double eps, double k)
    : kind_(kind), eps_(eps), k_(k) {}

SpectralShift SpectralShift::zero_energy(double eps) {
  if (!(eps > 0.0)) {
    throw domain_error("SpectralShift::zero_energy: eps must be positive");
  }
  return SpectralShift(ShiftKind::zero_energy_regularized, eps, 0.0);
}

SpectralShift SpectralShift::zero_energy_limit() {
  return SpectralShift(ShiftKind::zero_energy_limit, 0.0, 0.0);
}

SpectralShift SpectralShift::helmholtz(double k, double eps) {
  if (!(k > 0.0) || !(eps > 0.0)) {
    throw domain_error("SpectralShift::helmholtz: need k > 0 and eps > 0");
  }
  return SpectralShift(ShiftKind::helmholtz_regularized, eps, k);
}

SpectralShift SpectralShift::helmholtz_limit(double k) {
  if (!(k > 0.0)) {
    throw domain_error("SpectralShift::helmholtz_limit: k must be positive");
  }
  return SpectralShift(ShiftKind::helmholtz_limit, 0.0, k);
}

Complex SpectralShift::sigma() const {
  switch (kind_) {
    case ShiftKind::zero_energy_regularized:
      return Complex(0.0, eps_);
    case ShiftKind::zero_energy_limit:
      return Complex(0.0, 0.0);
    case ShiftKind::helmholtz_regularized:
      return Complex(-k_ * k_, -eps_);
    case ShiftKind::helmholtz_limit:
      return Complex(-k_ * k_, 0.0);
  }
  throw domain_error("SpectralShift: unknown kind");
}

kernels::WaveNumber SpectralShift::wavenumber() const {
  switch (kind_) {
    case ShiftKind::zero_energy_regularized:
      return kernels::zero_energy_wavenumber(eps_);
    case ShiftKind::zero_energy_limit:
      throw domain_error(
          "SpectralShift: the zero-energy limit has a logarithmic kernel, "
          "not a wave number");
    case ShiftKind::helmholtz_regularized:
      return kernels::helmholtz_wavenumber(k_, eps_);
    case ShiftKind::helmholtz_limit:
      return kernels::helmholtz_wavenumber(k_, 0.0);
  }
  throw domain_error("SpectralShift: unknown kind");
}

bool SpectralShift::regularized() const {
  return kind_ == ShiftKind::zero_energy_regularized ||
         kind_ == ShiftKind::helmholtz_regularized;
}

std::string SpectralShift::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ShiftKind::zero_energy_regularized:
      os << "zero-energy, eps=" << eps_;
      break;
    case ShiftKind::zero_energy_limit:
      os << "zero-energy limit";
      break;
    case ShiftKind::helmholtz_regularized:
      os << "helmholtz, k=" << k_ << ", eps=" << eps_;
      break;
    case ShiftKind::helmholtz_limit:
      os << "helmholtz limit, k=" << k_;
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Validation and quadrature.

std::pair<double, double> validate_coefficients(const CoefficientField& a,
                                                const SampleLattice& lattice) {
  if (lattice.per_side < 2 || !(lattice.half_width > 0.0)) {
    throw domain_error("validate_coefficients: degenerate sample lattice");
  }
  const double R = a.perturbation_radius;
  if (!(R > 0.0)) {
    throw domain_error("validate_coefficients: perturbation radius <= 0");
  }
  const int n = lattice.per_side;
  const double h = 2.0 * lattice.half_width / (n - 1);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Point2 p{-lattice.half_width + ix * h,
                     -lattice.half_width + iy * h};
      const Matrix2 m = a(p);
      if (!std::isfinite(m.a11) || !std::isfinite(m.a12) ||
          !std::isfinite(m.a22)) {
        throw domain_error("validate_coefficients: non-finite entry");
      }
      const double emin = m.eig_min();
      const double emax = m.eig_max();
      if (!(emin > 0.0)) {
        std::ostringstream os;
        os << "validate_coefficients: loss of ellipticity at (" << p.x << ", "
           << p.y << "), min eigenvalue " << emin;
        throw domain_error(os.str());
      }
      if (norm(p) > R &&
          (std::abs(m.a11 - 1.0) > 1e-12 || std::abs(m.a12) > 1e-12 ||
           std::abs(m.a22 - 1.0) > 1e-12)) {
        std::ostringstream os;
        os << "validate_coefficients: field differs from the identity at ("
           << p.x << ", " << p.y << "), outside radius " << R;
        throw domain_error(os.str());
      }
      lo = std::min(lo, emin);
      hi = std::max(hi, emax);
    }
  }
  return {lo, hi};
}

Complex source_mean(const SourceTerm& f, double quadrature_step) {
  const double s = f.support_radius;
  if (!(s > 0.0) || !(quadrature_step > 0.0)) {
    throw domain_error("source_mean: need positive support and step");
  }
  const int n = std::max(2, int(std::ceil(2.0 * s / quadrature_step)));
  const double h = 2.0 * s / n;
  Complex acc(0.0, 0.0);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Point2 p{-s + (ix + 0.5) * h, -s + (iy + 0.5) * h};
      acc += f(p);
    }
  }
  return acc * (h * h);
}

// ---------------------------------------------------------------------------
// Catalog.

double cubic_bump(double r, double rho) {
  const double t = (r * r) / (rho * rho);
  if (t >= 1.0) return 0.0;
  const double u = 1.0 - t;
  return u * u * u;
}

double unit_mass_bump(double r, double rho) {
  const double t = (r * r) / (rho * rho);
  if (t >= 1.0) return 0.0;
  const double u = 1.0 - t;
  return 3.0 / (kernels::pi * rho * rho) * u * u;
}

namespace {

// Two opposite unit-mass bumps of radius 0.5 centred at (+-0.35, 0);
// integral vanishes exactly by antisymmetry.
SourceTerm dipole_source() {
  SourceTerm f;
  f.support_radius = 1.0;
  f.values = [](Point2 p) {
    const double plus = unit_mass_bump(dist(p, {0.35, 0.0}), 0.5);
    const double minus = unit_mass_bump(dist(p, {-0.35, 0.0}), 0.5);
    return Complex(plus - minus, 0.0);
  };
  return f;
}

// Single unit-mass bump at the origin; integral is exactly 1.
SourceTerm monopole_source() {
  SourceTerm f;
  f.support_radius = 0.5;
  f.values = [](Point2 p) {
    return Complex(unit_mass_bump(norm(p), 0.5), 0.0);
  };
  return f;
}

CoefficientField identity_field() {
  CoefficientField a;
  a.perturbation_radius = 1.0;
  a.entries = [](Point2) { return identity_matrix(); };
  return a;
}

// Isotropic C^2 perturbation: a = (1 + 0.5 b(|x|)) I, b the cubic bump.
CoefficientField scalar_bump_field() {
  CoefficientField a;
  a.perturbation_radius = 1.0;
  a.entries = [](Point2 p) {
    const double s = 1.0 + 0.5 * cubic_bump(norm(p), 1.0);
    return Matrix2{s, 0.0, s};
  };
  return a;
}

// Full-matrix C^2 perturbation with off-diagonal coupling; eigenvalues of
// the perturbation lie in [-0.30, 0.55], so a stays uniformly elliptic.
CoefficientField anisotropic_field() {
  CoefficientField a;
  a.perturbation_radius = 1.0;
  a.entries = [](Point2 p) {
    const double b = cubic_bump(norm(p), 1.0);
    return Matrix2{1.0 + 0.5 * b, 0.2 * b, 1.0 - 0.25 * b};
  };
  return a;
}

std::vector<Problem> make_catalog() {
  std::vector<Problem> list;
  list.push_back({"identity-dipole",
                  "a = I, zero-mean source (two opposite bumps)",
                  identity_field(), dipole_source(), true});
  list.push_back({"identity-monopole",
                  "a = I, unit-mass source (single bump)",
                  identity_field(), monopole_source(), false});
  list.push_back({"bump-dipole",
                  "isotropic bump coefficients, zero-mean source",
                  scalar_bump_field(), dipole_source(), true});
  list.push_back({"anisotropic-dipole",
                  "anisotropic bump coefficients, zero-mean source",
                  anisotropic_field(), dipole_source(), true});
  return list;
}

}  // namespace

const std::vector<Problem>& builtin_problems() {
  static const std::vector<Problem> catalog = make_catalog();
  return catalog;
}

const Problem& find_problem(const std::string& name) {
  for (const Problem& p : builtin_problems()) {
    if (p.name == name) return p;
  }
  std::ostringstream os;
  os << "unknown problem '" << name << "'; available:";
  for (const Problem& p : builtin_problems()) os << ' ' << p.name;
  throw config_error(os.str());
}

}  // namespace lap2d::model
