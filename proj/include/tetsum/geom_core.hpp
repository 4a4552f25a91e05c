#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <utility>

#include "tetsum/error.hpp"

namespace tetsum {

/**
 * @brief Cartesian 3-vector, also used for points.
 *
 * Construction rejects NaN and infinite coordinates, so every value that
 * reaches the geometry routines is finite.
 */
class Vec3 {
 public:
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw Error(Errc::DegenerateInput, "non-finite coordinate");
    }
  }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { return *this = *this + o; }
  Vec3& operator-=(const Vec3& o) { return *this = *this - o; }

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  bool operator==(const Vec3&) const = default;
};

using Point3 = Vec3;

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
}

/**
 * @brief Comparison policy shared by every predicate in the library.
 *
 * Lengths compare with max(abs, rel * scale), where scale is the largest
 * magnitude involved; angles compare with the absolute angle_abs.
 */
struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
  double angle_abs = 1e-9;

  Tolerance() = default;
  Tolerance(double rel_, double abs_, double angle_abs_ = 1e-9)
      : rel(rel_), abs(abs_), angle_abs(angle_abs_) {
    if (!(rel > 0.0) || !(abs > 0.0) || !(angle_abs > 0.0)) {
      throw Error(Errc::OutOfDomain, "tolerances must be positive");
    }
  }

  double eps(double scale) const { return std::max(abs, rel * std::fabs(scale)); }

  bool equal(double u, double v, double scale) const { return std::fabs(u - v) <= eps(scale); }
  bool equal(double u, double v) const {
    return equal(u, v, std::max(std::fabs(u), std::fabs(v)));
  }
  bool angles_equal(double u, double v) const { return std::fabs(u - v) <= angle_abs; }
};

inline double dot(const Vec3& u, const Vec3& v) { return u.x * v.x + u.y * v.y + u.z * v.z; }

inline Vec3 cross(const Vec3& u, const Vec3& v) {
  return {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
}

inline double norm(const Vec3& u) { return std::sqrt(dot(u, u)); }

inline double distance(const Point3& p, const Point3& q) { return norm(p - q); }

/// Scalar triple product u . (v x w).
inline double triple(const Vec3& u, const Vec3& v, const Vec3& w) { return dot(u, cross(v, w)); }

inline Vec3 normalize(const Vec3& u, const Tolerance& tol = {}) {
  const double n = norm(u);
  if (n <= tol.abs) {
    throw Error(Errc::DegenerateInput, "cannot normalize a near-zero vector");
  }
  return u / n;
}

inline double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

/// Angle between two non-zero vectors, in [0, pi].
inline double angle_between(const Vec3& u, const Vec3& v) {
  // atan2 form keeps full precision near 0 and pi.
  return std::atan2(norm(cross(u, v)), dot(u, v));
}

/// Plane n . x = offset with unit normal n.
struct Plane {
  Vec3 normal;
  double offset = 0.0;

  static Plane through(const Point3& p, const Point3& q, const Point3& r, const Tolerance& tol = {}) {
    const Vec3 n = normalize(cross(q - p, r - p), tol);
    return {n, dot(n, p)};
  }

  double signed_distance(const Point3& p) const { return dot(normal, p) - offset; }
  Point3 project(const Point3& p) const { return p - normal * signed_distance(p); }
};

struct Line {
  Point3 origin;
  Vec3 direction;
};

inline double point_line_distance(const Point3& p, const Line& line, const Tolerance& tol = {}) {
  const Vec3 u = normalize(line.direction, tol);
  const Vec3 w = p - line.origin;
  return norm(w - u * dot(w, u));
}

inline Point3 project_onto_line(const Point3& p, const Line& line, const Tolerance& tol = {}) {
  const Vec3 u = normalize(line.direction, tol);
  return line.origin + u * dot(p - line.origin, u);
}

/// Solves the 3x3 system with columns c0, c1, c2 by Cramer's rule.
inline std::optional<Vec3> solve3(const Vec3& c0, const Vec3& c1, const Vec3& c2, const Vec3& rhs,
                                  double singular_below) {
  const double det = triple(c0, c1, c2);
  if (std::fabs(det) <= singular_below) return std::nullopt;
  return Vec3{triple(rhs, c1, c2) / det, triple(c0, rhs, c2) / det, triple(c0, c1, rhs) / det};
}

/**
 * @brief Intersection of three spheres.
 *
 * Returns the two common points, mirror images across the plane of the
 * centers. The first lies on the side of (c2 - c1) x (c3 - c1). A squared
 * height within +-abs of zero is clamped to tangency; below -abs there is
 * no common point.
 */
inline std::optional<std::pair<Point3, Point3>> trilaterate(const Point3& c1, const Point3& c2,
                                                            const Point3& c3, double r1, double r2,
                                                            double r3, const Tolerance& tol = {}) {
  if (!(r1 > 0.0) || !(r2 > 0.0) || !(r3 > 0.0)) {
    throw Error(Errc::DegenerateInput, "trilateration radii must be positive");
  }
  const double d = distance(c1, c2);
  if (d <= tol.abs) throw Error(Errc::DegenerateInput, "coincident sphere centers");
  const Vec3 ex = (c2 - c1) / d;
  const double i = dot(ex, c3 - c1);
  const Vec3 yv = (c3 - c1) - ex * i;
  const double j = norm(yv);
  const double scale = std::max({d, norm(c3 - c1), r1, r2, r3});
  if (j <= tol.eps(scale)) throw Error(Errc::DegenerateInput, "collinear sphere centers");
  const Vec3 ey = yv / j;
  const Vec3 ez = cross(ex, ey);

  const double px = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double py = (r1 * r1 - r3 * r3 + i * i + j * j) / (2.0 * j) - (i / j) * px;
  double h2 = r1 * r1 - px * px - py * py;
  // Squared height carries the squared length scale.
  const double h2_tol = tol.abs * std::max(1.0, scale * scale);
  if (h2 < -h2_tol) return std::nullopt;
  if (h2 < h2_tol) h2 = 0.0;
  const double h = std::sqrt(h2);
  const Point3 base = c1 + ex * px + ey * py;
  return std::make_pair(base + ez * h, base - ez * h);
}

}  // namespace tetsum
