#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lap2d/geometry.hpp"

// Uniform Cartesian grid on the truncated square [-L, L]^2 and complex
// fields sampled on it.  The point count per side is odd so the origin is a
// node; data is stored row major with x varying fastest.

namespace lap2d {

using Complex = std::complex<double>;

struct Grid {
  double half_width = 8.0;  // L: truncation half-width
  int n = 513;              // points per side, odd, >= 65

  Grid() = default;
  Grid(double half_width_, int n_);  // validates the invariants

  double spacing() const { return 2.0 * half_width / (n - 1); }
  double coord(int i) const { return -half_width + i * spacing(); }
  Point2 node(int ix, int iy) const { return {coord(ix), coord(iy)}; }
  int index(int ix, int iy) const { return iy * n + ix; }
  int size() const { return n * n; }
  bool interior(int ix, int iy) const {
    return ix > 0 && iy > 0 && ix < n - 1 && iy < n - 1;
  }

  bool operator==(const Grid&) const = default;
};

class GridField {
 public:
  GridField() = default;
  explicit GridField(const Grid& grid)
      : grid_(grid), data_(size_t(grid.size()), Complex(0.0, 0.0)) {}
  GridField(const Grid& grid, std::vector<Complex> data);

  const Grid& grid() const { return grid_; }
  Complex& at(int ix, int iy) { return data_[grid_.index(ix, iy)]; }
  Complex at(int ix, int iy) const { return data_[grid_.index(ix, iy)]; }
  const std::vector<Complex>& data() const { return data_; }
  std::vector<Complex>& data() { return data_; }

  bool all_finite() const;

  // Value at an arbitrary point of the square by 4x4 tensor-product cubic
  // Lagrange interpolation (bicubic, O(h^4) for smooth fields).  Throws
  // domain_error outside [-L, L]^2.
  Complex interpolate(Point2 p) const;

 private:
  Grid grid_;
  std::vector<Complex> data_;
};

// Pointwise sampling helper.
GridField sample_on_grid(const Grid& grid,
                         const std::function<Complex(Point2)>& fn);

// Serialization.  Binary layout: one text header line "L n\n" followed by
// n*n row-major (re, im) pairs of 8-byte little-endian floats.  The CSV
// export has a "x,y,re,im" header row.
void write_binary(const GridField& field, const std::string& path);
GridField read_binary(const std::string& path);
void write_csv(const GridField& field, const std::string& path);

}  // namespace lap2d
