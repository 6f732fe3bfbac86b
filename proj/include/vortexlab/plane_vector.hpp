#pragma once

#include <cmath>
#include <stdexcept>

namespace vortexlab {

/// A point or velocity in the plane.
struct PlaneVector {
  double x = 0.0;
  double y = 0.0;

  constexpr PlaneVector& operator+=(const PlaneVector& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr PlaneVector& operator-=(const PlaneVector& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr PlaneVector& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr PlaneVector operator+(PlaneVector a, const PlaneVector& b) { return a += b; }
  friend constexpr PlaneVector operator-(PlaneVector a, const PlaneVector& b) { return a -= b; }
  friend constexpr PlaneVector operator-(const PlaneVector& a) { return {-a.x, -a.y}; }
  friend constexpr PlaneVector operator*(double s, PlaneVector a) { return a *= s; }
  friend constexpr PlaneVector operator*(PlaneVector a, double s) { return a *= s; }
  friend constexpr bool operator==(const PlaneVector&, const PlaneVector&) = default;

  constexpr double dot(const PlaneVector& o) const { return x * o.x + y * o.y; }
  constexpr double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  /// Counterclockwise rotation by a right angle: (x, y) -> (-y, x).
  constexpr PlaneVector perp() const { return {-y, x}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const PlaneVector& a, const PlaneVector& b) { return (a - b).norm(); }

inline void require_finite(const PlaneVector& v, const char* what) {
  if (!v.finite()) throw std::domain_error(std::string(what) + ": non-finite coordinate");
}

}  // namespace vortexlab
