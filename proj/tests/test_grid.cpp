#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "lap2d/errors.hpp"
#include "lap2d/grid.hpp"

using namespace lap2d;

TEST_CASE("grid constructor invariants") {
  const Grid g(4.0, 65);
  CHECK(g.spacing() == doctest::Approx(0.125));
  CHECK(g.coord(0) == doctest::Approx(-4.0));
  CHECK(g.coord(64) == doctest::Approx(4.0));
  CHECK(g.coord(32) == doctest::Approx(0.0));  // odd n: origin is a node
  CHECK(g.size() == 65 * 65);
  CHECK(g.interior(1, 1));
  CHECK(!g.interior(0, 5));
  CHECK(!g.interior(64, 5));

  CHECK_THROWS_AS(Grid(4.0, 64), config_error);   // even
  CHECK_THROWS_AS(Grid(4.0, 33), config_error);   // too few
  CHECK_THROWS_AS(Grid(0.0, 65), config_error);   // degenerate domain
  CHECK_THROWS_AS(Grid(-1.0, 65), config_error);
}

TEST_CASE("sampling and round trip through binary serialization") {
  const Grid g(2.0, 65);
  const GridField field = sample_on_grid(g, [](Point2 p) {
    return Complex(std::sin(p.x) * p.y, std::cos(p.y) - p.x);
  });
  const auto path =
      std::filesystem::temp_directory_path() / "lap2d_test_field.bin";
  write_binary(field, path.string());
  const GridField back = read_binary(path.string());
  std::filesystem::remove(path);

  REQUIRE(back.grid() == g);
  double max_dev = 0.0;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      max_dev = std::max(max_dev, std::abs(back.at(ix, iy) - field.at(ix, iy)));
  CHECK(max_dev == 0.0);  // bit-exact round trip
}

TEST_CASE("interpolation reproduces cubics exactly") {
  const Grid g(2.0, 65);
  // Bicubic Lagrange interpolation is exact on polynomials of degree <= 3
  // in each variable.
  const auto poly = [](Point2 p) {
    return Complex(1.0 + p.x * (2.0 + p.x * (0.5 - 0.25 * p.x)),
                   p.y * p.y * p.y - 2.0 * p.y + 0.75);
  };
  const GridField field = sample_on_grid(g, poly);
  for (Point2 p : {Point2{0.013, -0.41}, Point2{1.97, 1.99},
                   Point2{-1.999, 0.77}, Point2{0.0, 0.0}}) {
    CAPTURE(p.x);
    CAPTURE(p.y);
    CHECK(std::abs(field.interpolate(p) - poly(p)) < 1e-12);
  }
  CHECK_THROWS_AS(field.interpolate({2.001, 0.0}), domain_error);
}

TEST_CASE("interpolation is fourth order on smooth fields") {
  const auto smooth = [](Point2 p) {
    return Complex(std::sin(2.0 * p.x + 0.3) * std::cos(p.y), 0.0);
  };
  const Point2 probe{0.377, -0.613};
  double errs[2];
  for (int pass = 0; pass < 2; ++pass) {
    const Grid g(2.0, pass == 0 ? 65 : 129);
    const GridField field = sample_on_grid(g, smooth);
    errs[pass] = std::abs(field.interpolate(probe) - smooth(probe));
  }
  // Halving h should shrink the error by about 16; allow slack.
  CHECK(errs[0] / errs[1] > 8.0);
}

TEST_CASE("all_finite detects poisoned entries") {
  const Grid g(1.0, 65);
  GridField field(g);
  CHECK(field.all_finite());
  field.at(3, 7) = Complex(std::nan(""), 0.0);
  CHECK(!field.all_finite());
}

TEST_CASE("csv export has the documented shape") {
  const Grid g(1.0, 65);
  const GridField field = sample_on_grid(g, [](Point2 p) {
    return Complex(p.x, p.y);
  });
  const auto path =
      std::filesystem::temp_directory_path() / "lap2d_test_field.csv";
  write_csv(field, path.string());
  std::FILE* fp = std::fopen(path.string().c_str(), "r");
  REQUIRE(fp != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, fp) != nullptr);
  CHECK(std::string(line).rfind("x,y,re,im", 0) == 0);
  int rows = 0;
  while (std::fgets(line, sizeof line, fp) != nullptr) ++rows;
  std::fclose(fp);
  std::filesystem::remove(path);
  CHECK(rows == g.size());
}
