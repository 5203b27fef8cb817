#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "lap2d/errors.hpp"
#include "lap2d/problem_model.hpp"

using namespace lap2d;
using model::Complex;

TEST_CASE("matrix eigenvalue range") {
  const model::Matrix2 id = model::identity_matrix();
  CHECK(id.eig_min() == doctest::Approx(1.0));
  CHECK(id.eig_max() == doctest::Approx(1.0));

  // Eigenvalues of [[2, 1], [1, 2]] are 1 and 3.
  const model::Matrix2 m{2.0, 1.0, 2.0};
  CHECK(m.eig_min() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.eig_max() == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("spectral shift values and guards") {
  const auto ze = model::SpectralShift::zero_energy(0.25);
  CHECK(ze.sigma() == Complex(0.0, 0.25));
  CHECK(ze.regularized());
  const Complex kz = ze.wavenumber().value();
  CHECK(std::abs(kz * kz - Complex(0.0, -0.25)) < 1e-15);

  const auto zl = model::SpectralShift::zero_energy_limit();
  CHECK(zl.sigma() == Complex(0.0, 0.0));
  CHECK(!zl.regularized());
  CHECK_THROWS_AS(zl.wavenumber(), domain_error);

  const auto hh = model::SpectralShift::helmholtz(2.0, 0.01);
  CHECK(hh.sigma() == Complex(-4.0, -0.01));
  const Complex kh = hh.wavenumber().value();
  CHECK(std::abs(kh * kh - Complex(4.0, 0.01)) < 1e-12);

  const auto hl = model::SpectralShift::helmholtz_limit(2.0);
  CHECK(hl.sigma() == Complex(-4.0, 0.0));
  CHECK(hl.wavenumber().value() == Complex(2.0, 0.0));

  CHECK_THROWS_AS(model::SpectralShift::zero_energy(0.0), domain_error);
  CHECK_THROWS_AS(model::SpectralShift::zero_energy(-1.0), domain_error);
  CHECK_THROWS_AS(model::SpectralShift::helmholtz(0.0, 0.1), domain_error);
  CHECK_THROWS_AS(model::SpectralShift::helmholtz(1.0, 0.0), domain_error);
  CHECK_THROWS_AS(model::SpectralShift::helmholtz_limit(-2.0), domain_error);
}

TEST_CASE("coefficient validation accepts elliptic fields and rejects bad ones") {
  model::CoefficientField good;
  good.entries = [](Point2 p) {
    const double b = model::cubic_bump(norm(p), 1.0);
    return model::Matrix2{1.0 + 0.5 * b, 0.2 * b, 1.0 + 0.3 * b};
  };
  good.perturbation_radius = 1.0;
  const auto [lo, hi] = model::validate_coefficients(good, {});
  CHECK(lo > 0.0);
  CHECK(hi >= 1.0);
  CHECK(lo <= 1.0);

  model::CoefficientField trailing;  // not identity outside its radius
  trailing.entries = [](Point2) { return model::Matrix2{2.0, 0.0, 2.0}; };
  trailing.perturbation_radius = 1.0;
  CHECK_THROWS_AS(model::validate_coefficients(trailing, {}), domain_error);

  model::CoefficientField indefinite;
  indefinite.entries = [](Point2 p) {
    const double b = model::cubic_bump(norm(p), 1.0);
    return model::Matrix2{1.0 - 2.0 * b, 0.0, 1.0};  // negative near 0
  };
  indefinite.perturbation_radius = 1.0;
  CHECK_THROWS_AS(model::validate_coefficients(indefinite, {}), domain_error);
}

TEST_CASE("bump profiles: support, smoothness scale, and mass") {
  CHECK(model::cubic_bump(0.0, 1.0) == doctest::Approx(1.0));
  CHECK(model::cubic_bump(1.0, 1.0) == doctest::Approx(0.0));
  CHECK(model::cubic_bump(1.5, 1.0) == 0.0);

  // unit_mass_bump integrates to 1 over the plane.
  const double rho = 0.7;
  const int n = 4000;
  double mass = 0.0;
  const double dr = rho / n;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * dr;
    mass += model::unit_mass_bump(r, rho) * kernels::two_pi * r * dr;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("source mean by midpoint quadrature") {
  model::SourceTerm f;
  f.support_radius = 0.5;
  f.values = [](Point2 p) {
    return Complex(model::unit_mass_bump(norm(p), 0.5), 0.0);
  };
  const Complex mean = model::source_mean(f, 0.002);
  CHECK(mean.real() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(mean.imag() == doctest::Approx(0.0));
}

TEST_CASE("catalog invariants") {
  const auto& problems = model::builtin_problems();
  CHECK(problems.size() >= 4);
  for (const auto& p : problems) {
    CAPTURE(p.name);
    // Declared zero-mean problems integrate to ~0; others to ~1.
    const Complex mean = model::source_mean(p.f, 0.004);
    if (p.zero_mean) {
      CHECK(std::abs(mean) < 1e-10);
    } else {
      CHECK(std::abs(mean - Complex(1.0, 0.0)) < 1e-4);
    }
    // Coefficients validate as elliptic.
    const auto [lo, hi] = model::validate_coefficients(p.a, {});
    CHECK(lo > 0.0);
    CHECK(hi < 10.0);
    // Sources vanish outside their declared support.
    for (double phi : {0.1, 2.0, 4.0}) {
      const Point2 outside =
          from_polar(p.f.support_radius + 0.01, phi);
      CHECK(p.f(outside) == Complex(0.0, 0.0));
    }
  }
}

TEST_CASE("identity flag and problem lookup") {
  CHECK(model::find_problem("identity-dipole").a.is_identity());
  CHECK(model::find_problem("identity-monopole").a.is_identity());
  CHECK(!model::find_problem("bump-dipole").a.is_identity());
  CHECK(!model::find_problem("anisotropic-dipole").a.is_identity());
  CHECK_THROWS_AS(model::find_problem("no-such-problem"), config_error);
}

TEST_CASE("dipole problems are antisymmetric in x") {
  const auto& p = model::find_problem("identity-dipole");
  for (double x : {0.1, 0.3, 0.6}) {
    for (double y : {0.0, 0.2}) {
      CHECK(p.f({x, y}) == -p.f({-x, y}));
    }
  }
}
