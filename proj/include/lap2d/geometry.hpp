#pragma once

#include <cmath>

namespace lap2d {

// Plain 2-d point / vector.  Everything in the library works in Cartesian
// coordinates centred at the origin of the coefficient perturbation.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

// Unit vector along a; caller guarantees a != 0.
inline Point2 unit(Point2 a) {
  const double r = norm(a);
  return {a.x / r, a.y / r};
}

inline Point2 from_polar(double r, double phi) {
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace lap2d
