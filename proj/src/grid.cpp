#include "lap2d/grid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lap2d/errors.hpp"

namespace lap2d {

Grid::Grid(double half_width_, int n_) : half_width(half_width_), n(n_) {
  if (!(half_width > 0.0)) {
    throw config_error("Grid: half_width must be positive");
  }
  if (n < 65 || n % 2 == 0) {
    throw config_error("Grid: need an odd point count n >= 65");
  }
}

GridField::GridField(const Grid& grid, std::vector<Complex> data)
    : grid_(grid), data_(std::move(data)) {
  if (data_.size() != size_t(grid.size())) {
    throw config_error("GridField: data size does not match the grid");
  }
}

bool GridField::all_finite() const {
  for (const Complex& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

Complex GridField::interpolate(Point2 p) const {
  const Grid& g = grid_;
  const double h = g.spacing();
  const double tol = 1e-12 * g.half_width;
  if (std::abs(p.x) > g.half_width + tol || std::abs(p.y) > g.half_width + tol) {
    throw domain_error("GridField::interpolate: point outside the grid");
  }
  // 4-node stencil starting at base, chosen so the point sits in the middle
  // cell; clamped at the edges.
  const auto base = [&](double c) {
    int b = int(std::floor((c + g.half_width) / h)) - 1;
    return std::clamp(b, 0, g.n - 4);
  };
  const int bx = base(p.x);
  const int by = base(p.y);
  // Cubic Lagrange weights at local coordinate t (units of h from node b).
  const auto weights = [](double t) {
    return std::array<double, 4>{
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0};
  };
  const auto wx = weights((p.x - g.coord(bx)) / h);
  const auto wy = weights((p.y - g.coord(by)) / h);
  Complex acc(0.0, 0.0);
  for (int j = 0; j < 4; ++j) {
    Complex row(0.0, 0.0);
    for (int i = 0; i < 4; ++i) {
      row += wx[i] * data_[g.index(bx + i, by + j)];
    }
    acc += wy[j] * row;
  }
  return acc;
}

GridField sample_on_grid(const Grid& grid,
                         const std::function<Complex(Point2)>& fn) {
  GridField out(grid);
  for (int iy = 0; iy < grid.n; ++iy) {
    for (int ix = 0; ix < grid.n; ++ix) {
      out.at(ix, iy) = fn(grid.node(ix, iy));
    }
  }
  return out;
}

namespace {

static_assert(sizeof(double) == 8, "serialization assumes 8-byte doubles");

void put_le(std::ostream& os, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  char buf[8];
  std::memcpy(buf, &bits, 8);
  os.write(buf, 8);
}

double get_le(std::istream& is) {
  char buf[8];
  is.read(buf, 8);
  uint64_t bits;
  std::memcpy(&bits, buf, 8);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_binary(const GridField& field, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw config_error("write_binary: cannot open " + path);
  std::ostringstream header;
  header.precision(17);
  header << field.grid().half_width << ' ' << field.grid().n << '\n';
  os << header.str();
  for (const Complex& v : field.data()) {
    put_le(os, v.real());
    put_le(os, v.imag());
  }
  if (!os) throw config_error("write_binary: write failed for " + path);
}

GridField read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw config_error("read_binary: cannot open " + path);
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  double half_width = 0.0;
  int n = 0;
  if (!(hs >> half_width >> n)) {
    throw config_error("read_binary: malformed header in " + path);
  }
  Grid grid(half_width, n);
  std::vector<Complex> data(size_t(grid.size()));
  for (Complex& v : data) {
    const double re = get_le(is);
    const double im = get_le(is);
    v = Complex(re, im);
  }
  if (!is) throw config_error("read_binary: truncated data in " + path);
  return GridField(grid, std::move(data));
}

void write_csv(const GridField& field, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw config_error("write_csv: cannot open " + path);
  os.precision(17);
  os << "x,y,re,im\n";
  const Grid& g = field.grid();
  for (int iy = 0; iy < g.n; ++iy) {
    for (int ix = 0; ix < g.n; ++ix) {
      const Point2 p = g.node(ix, iy);
      const Complex v = field.at(ix, iy);
      os << p.x << ',' << p.y << ',' << v.real() << ',' << v.imag() << '\n';
    }
  }
}

}  // namespace lap2d
