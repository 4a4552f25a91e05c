#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "tetsum/geom_core.hpp"
#include "tetsum/tet_metrics.hpp"

namespace tetsum {

/**
 * @brief Tangent lengths of a triangle's three mutually tangent vertex circles.
 *
 * For a triangle A1A2A3 the sides are a = |A1A2| = l1 + l2,
 * b = |A1A3| = l1 + l3 and c = |A2A3| = l2 + l3.
 */
struct TangentLengths3 {
  double l1 = 0, l2 = 0, l3 = 0;

  TangentLengths3() = default;
  TangentLengths3(double l1_, double l2_, double l3_) : l1(l1_), l2(l2_), l3(l3_) {
    if (!(l1 > 0) || !(l2 > 0) || !(l3 > 0)) {
      throw Error(Errc::OutOfDomain, "tangent lengths must be positive");
    }
  }
  std::array<double, 3> as_array() const { return {l1, l2, l3}; }
};

/// Tangent lengths l[i] at vertex P(i+1); every edge PiPj equals l[i] + l[j].
struct TangentLengths4 {
  std::array<double, 4> l{};

  TangentLengths4() = default;
  TangentLengths4(double l1, double l2, double l3, double l4) : l{l1, l2, l3, l4} {
    for (double v : l) {
      if (!(v > 0)) throw Error(Errc::OutOfDomain, "tangent lengths must be positive");
    }
  }
  double operator[](int i) const { return l[static_cast<std::size_t>(i)]; }
  double sum() const { return l[0] + l[1] + l[2] + l[3]; }
};

inline TangentLengths3 triangle_to_tangents(double a, double b, double c, const Tolerance& tol = {}) {
  const double slack = tol.eps(std::max({a, b, c}));
  if (!(a > 0 && b > 0 && c > 0) || a >= b + c - slack || b >= a + c - slack || c >= a + b - slack) {
    throw Error(Errc::NoTriangle, "sides violate the strict triangle inequalities");
  }
  return {0.5 * (a + b - c), 0.5 * (a + c - b), 0.5 * (b + c - a)};
}

/// Returns (a, b, c) = (l1 + l2, l1 + l3, l2 + l3).
inline std::array<double, 3> tangents_to_triangle(const TangentLengths3& t) {
  return {t.l1 + t.l2, t.l1 + t.l3, t.l2 + t.l3};
}

/// Sextuple with edge PiPj = l[i] + l[j] (a = l1+l2, b = l2+l3, c = l1+l3, ...).
inline EdgeSextuple induced_sextuple(const TangentLengths4& t) {
  std::array<double, 6> e{};
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kEdgeVertices[static_cast<std::size_t>(k)];
    e[static_cast<std::size_t>(k)] = t[i] + t[j];
  }
  return {e[0], e[1], e[2], e[3], e[4], e[5]};
}

/// Canonical test: the three opposite-edge sums agree.
inline bool is_fourball(const Tetra& t, const Tolerance& tol = {}) {
  return opposite_sums_equal(edge_sextuple(t), tol);
}

/// Incenter and inradius of triangle (p, q, r).
inline Sphere incircle(const Point3& p, const Point3& q, const Point3& r) {
  const double a = distance(q, r);
  const double b = distance(p, r);
  const double c = distance(p, q);
  const double per = a + b + c;
  return {(p * a + q * b + r * c) / per, 2.0 * triangle_area(p, q, r) / per};
}

inline Sphere face_incircle(const Tetra& t, int k) {
  const auto f = face_vertices(k);
  return incircle(t[f[0]], t[f[1]], t[f[2]]);
}

/// Point minimizing the summed squared distance to the lines; nullopt when they are parallel.
template <std::size_t N>
std::optional<Point3> least_squares_meet(const std::array<Line, N>& lines, const Tolerance& tol = {}) {
  // sum_k (I - u u^T) x = sum_k (I - u u^T) p_k
  std::array<Vec3, 3> cols{Vec3{0, 0, 0}, Vec3{0, 0, 0}, Vec3{0, 0, 0}};
  Vec3 rhs{0, 0, 0};
  for (const auto& line : lines) {
    const Vec3 u = normalize(line.direction, tol);
    const Vec3 ex{1, 0, 0}, ey{0, 1, 0}, ez{0, 0, 1};
    cols[0] += ex - u * u.x;
    cols[1] += ey - u * u.y;
    cols[2] += ez - u * u.z;
    rhs += line.origin - u * dot(u, line.origin);
  }
  return solve3(cols[0], cols[1], cols[2], rhs, 1e-14);
}

/// Perpendiculars to the four faces through the face incenters.
inline std::array<Line, 4> incenter_perpendiculars(const Tetra& t, const Tolerance& tol = {}) {
  std::array<Line, 4> out;
  for (int k = 0; k < 4; ++k) {
    out[static_cast<std::size_t>(k)] = Line{face_incircle(t, k).center, outward_normal(t, k, tol)};
  }
  return out;
}

struct ConditionResult {
  bool pass = false;
  double residual = 0.0;
  double threshold = 0.0;
};

/**
 * @brief The five equivalent characterizations of a 4-ball tetrahedron.
 *
 *   1. opposite edge sums equal
 *   2. opposite dihedral angle sums equal
 *   3. incircles of adjacent faces touch the shared edge at the same point
 *   4. four mutually externally tangent balls centered at the vertices
 *   5. incenter perpendiculars of the four faces are concurrent
 */
struct FourBallReport {
  std::array<ConditionResult, 5> conditions{};

  bool all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.pass; });
  }
  bool none_pass() const {
    return std::none_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.pass; });
  }
  bool consistent() const { return all_pass() || none_pass(); }
};

inline FourBallReport fourball_checks(const Tetra& t, const Tolerance& tol = {}) {
  FourBallReport rep;
  const auto s = edge_sextuple(t);
  const double scale = s.max_edge();
  const double len_tol = tol.eps(scale);

  {
    const auto sums = s.opposite_sums();
    const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
    rep.conditions[0] = {*hi - *lo <= tol.eps(*hi), *hi - *lo, tol.eps(*hi)};
  }
  {
    const auto sums = dihedral_angles(t, tol).opposite_sums();
    const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
    rep.conditions[1] = {*hi - *lo <= tol.angle_abs, *hi - *lo, tol.angle_abs};
  }
  {
    // Touch point of the incircle of face (i, j, k) on edge ij sits at
    // (|ij| + |ik| - |jk|) / 2 from Pi.
    double worst = 0.0;
    for (int e = 0; e < 6; ++e) {
      const auto [i, j] = kEdgeVertices[static_cast<std::size_t>(e)];
      int others[2];
      int m = 0;
      for (int v = 0; v < 4; ++v) {
        if (v != i && v != j) others[m++] = v;
      }
      const double t1 = 0.5 * (s.between(i, j) + s.between(i, others[0]) - s.between(j, others[0]));
      const double t2 = 0.5 * (s.between(i, j) + s.between(i, others[1]) - s.between(j, others[1]));
      worst = std::max(worst, std::fabs(t1 - t2));
    }
    rep.conditions[2] = {worst <= len_tol, worst, len_tol};
  }
  {
    // Radii of three kissing balls on face P1P2P3, then the fourth radius
    // as seen from each of them.
    const auto base = triangle_to_tangents(s.a, s.c, s.b, tol);
    const std::array<double, 3> l{base.l1, base.l2, base.l3};
    std::array<double, 3> fourth{};
    for (int i = 0; i < 3; ++i) {
      fourth[static_cast<std::size_t>(i)] = s.between(i, 3) - l[static_cast<std::size_t>(i)];
    }
    const auto [lo, hi] = std::minmax_element(fourth.begin(), fourth.end());
    const double spread = *hi - *lo;
    rep.conditions[3] = {spread <= len_tol && *lo > 0.0, spread, len_tol};
  }
  {
    const auto lines = incenter_perpendiculars(t, tol);
    double worst = std::numeric_limits<double>::infinity();
    if (const auto x = least_squares_meet(lines, tol)) {
      worst = 0.0;
      for (const auto& line : lines) worst = std::max(worst, point_line_distance(*x, line, tol));
    }
    rep.conditions[4] = {worst <= len_tol, worst, len_tol};
  }
  return rep;
}

inline TangentLengths4 fourball_tangents(const Tetra& t, const Tolerance& tol = {}) {
  if (!is_fourball(t, tol)) throw Error(Errc::NotFourBall, "opposite edge sums differ");
  const auto s = edge_sextuple(t);
  const double scale = s.max_edge();
  // Estimate every l_i from each face containing vertex i.
  std::array<std::array<double, 3>, 4> est{};
  std::array<int, 4> count{};
  for (int k = 0; k < 4; ++k) {
    const auto f = face_vertices(k);
    const auto tl = triangle_to_tangents(s.between(f[0], f[1]), s.between(f[0], f[2]),
                                         s.between(f[1], f[2]), tol);
    const std::array<double, 3> vals{tl.l1, tl.l2, tl.l3};
    for (int m = 0; m < 3; ++m) {
      const auto v = static_cast<std::size_t>(f[static_cast<std::size_t>(m)]);
      est[v][static_cast<std::size_t>(count[v]++)] = vals[static_cast<std::size_t>(m)];
    }
  }
  std::array<double, 4> l{};
  for (std::size_t v = 0; v < 4; ++v) {
    const auto [lo, hi] = std::minmax_element(est[v].begin(), est[v].end());
    if (*hi - *lo > tol.eps(scale)) {
      throw Error(Errc::NotFourBall, "tangent lengths disagree across faces");
    }
    l[v] = (est[v][0] + est[v][1] + est[v][2]) / 3.0;
  }
  return {l[0], l[1], l[2], l[3]};
}

/// Point on edge PiPj at distance l[i] from Pi.
inline Point3 tangency_point(const Tetra& t, const TangentLengths4& l, int i, int j) {
  const Vec3 dir = t[j] - t[i];
  return t[i] + dir * (l[i] / norm(dir));
}

enum class CenterLocation { Interior, Boundary, Exterior };

inline std::string_view to_string(CenterLocation c) {
  switch (c) {
    case CenterLocation::Interior: return "interior";
    case CenterLocation::Boundary: return "boundary";
    case CenterLocation::Exterior: return "exterior";
  }
  return "?";
}

struct MidSphere {
  Point3 center;
  double radius = 0.0;
  CenterLocation location = CenterLocation::Interior;
  std::array<double, 4> barycentric{};
  /// Largest |dist(center, edge line) - radius| after polishing.
  double residual = 0.0;
};

inline std::array<Line, 6> edge_lines(const Tetra& t) {
  std::array<Line, 6> out;
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kEdgeVertices[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = Line{t[i], t[j] - t[i]};
  }
  return out;
}

/**
 * Radius from rho = 2 l1 l2 l3 l4 / (3 V). The center is seeded at the
 * least-squares meet of the incenter perpendiculars, then polished by
 * Gauss-Newton on the six residuals dist(G, edge line) - rho.
 */
inline MidSphere midsphere(const Tetra& t, const Tolerance& tol = {}) {
  const auto l = fourball_tangents(t, tol);
  const double vol = volume(t);
  MidSphere ms;
  ms.radius = 2.0 * l[0] * l[1] * l[2] * l[3] / (3.0 * vol);

  const auto seed = least_squares_meet(incenter_perpendiculars(t, tol), tol);
  if (!seed) throw Error(Errc::DegenerateInput, "incenter perpendiculars are parallel");
  Point3 g = *seed;
  const auto lines = edge_lines(t);
  const double scale = max_edge_length(t);

  for (int iter = 0; iter < 50; ++iter) {
    std::array<Vec3, 3> cols{Vec3{0, 0, 0}, Vec3{0, 0, 0}, Vec3{0, 0, 0}};
    Vec3 rhs{0, 0, 0};
    for (const auto& line : lines) {
      const Point3 foot = project_onto_line(g, line, tol);
      const double dist = distance(g, foot);
      if (dist <= tol.abs) continue;
      const Vec3 grad = (g - foot) / dist;
      const double r = dist - ms.radius;
      cols[0] += grad * grad.x;
      cols[1] += grad * grad.y;
      cols[2] += grad * grad.z;
      rhs -= grad * r;
    }
    const auto step = solve3(cols[0], cols[1], cols[2], rhs, 1e-300);
    if (!step) break;
    g += *step;
    if (norm(*step) <= 1e-15 * scale) break;
  }
  ms.center = g;
  for (const auto& line : lines) {
    ms.residual = std::max(ms.residual, std::fabs(point_line_distance(g, line, tol) - ms.radius));
  }
  ms.barycentric = barycentric(t, g);
  const double lo = *std::min_element(ms.barycentric.begin(), ms.barycentric.end());
  if (lo > tol.rel) {
    ms.location = CenterLocation::Interior;
  } else if (lo >= -tol.rel) {
    ms.location = CenterLocation::Boundary;
  } else {
    ms.location = CenterLocation::Exterior;
  }
  return ms;
}

/// Four balls of radii l[i] at the vertices of a tetrahedron exist iff the induced sextuple embeds.
inline bool kissing_feasible(const TangentLengths4& t4, const Tolerance& tol = {}) {
  return tetra_exists(induced_sextuple(t4), tol).ok();
}

struct SoddyCircle {
  Point3 center;
  double radius = 0.0;
};

/// Inner Soddy radius from Descartes' theorem.
inline double soddy_radius(const TangentLengths3& t3) {
  const double k1 = 1.0 / t3.l1, k2 = 1.0 / t3.l2, k3 = 1.0 / t3.l3;
  return 1.0 / (k1 + k2 + k3 + 2.0 * std::sqrt(k1 * k2 + k2 * k3 + k3 * k1));
}

/**
 * Circle in the plane of A1A2A3, externally tangent to the three circles
 * centered at Ai with radii li. The circles must be mutually tangent:
 * |A1A2| = l1 + l2, |A1A3| = l1 + l3, |A2A3| = l2 + l3.
 */
inline SoddyCircle soddy_inner(const Point3& a1, const Point3& a2, const Point3& a3,
                               const TangentLengths3& t3, const Tolerance& tol = {}) {
  const double s12 = distance(a1, a2), s13 = distance(a1, a3), s23 = distance(a2, a3);
  const double scale = std::max({s12, s13, s23});
  if (!tol.equal(s12, t3.l1 + t3.l2, scale) || !tol.equal(s13, t3.l1 + t3.l3, scale) ||
      !tol.equal(s23, t3.l2 + t3.l3, scale)) {
    throw Error(Errc::BadConfiguration, "vertex circles are not mutually tangent");
  }
  const double l0 = soddy_radius(t3);
  const Vec3 e1 = (a2 - a1) / s12;
  const Vec3 n = normalize(cross(a2 - a1, a3 - a1), tol);
  const Vec3 e2 = cross(n, e1);
  const double r1 = t3.l1 + l0, r2 = t3.l2 + l0;
  const double x = (r1 * r1 - r2 * r2 + s12 * s12) / (2.0 * s12);
  const double y = std::sqrt(std::max(0.0, r1 * r1 - x * x));
  const Point3 center = a1 + e1 * x + e2 * y;
  if (!tol.equal(distance(center, a3), t3.l3 + l0, scale)) {
    throw Error(Errc::BadConfiguration, "no circle tangent to all three vertex circles");
  }
  return {center, l0};
}

/**
 * Apex A4 at distance li + l4 from each Ai, i.e. a fourth ball of radius l4
 * kissing the three vertex balls. The default apex lies on the side of
 * (A2 - A1) x (A3 - A1); `mirror` selects the reflected one.
 */
inline Tetra fourball_from_face(const Point3& a1, const Point3& a2, const Point3& a3, double l4,
                                bool mirror = false, const Tolerance& tol = {}) {
  const auto t3 = triangle_to_tangents(distance(a1, a2), distance(a1, a3), distance(a2, a3), tol);
  const double l0 = soddy_radius(t3);
  if (!(l4 > l0 + tol.eps(l0))) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "apex tangent length l4 = " << l4 << " does not exceed the Soddy radius l0 = " << l0
        << " (degenerate planar configuration)";
    throw Error(Errc::ApexDegenerate, msg.str());
  }
  const auto apex = trilaterate(a1, a2, a3, t3.l1 + l4, t3.l2 + l4, t3.l3 + l4, tol);
  if (!apex) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "no ball of radius l4 = " << l4 << " kisses all three vertex balls (Soddy radius l0 = "
        << l0 << ")";
    throw Error(Errc::NotConstructible, msg.str());
  }
  return Tetra(a1, a2, a3, mirror ? apex->second : apex->first, tol);
}

/// The flat limit l4 = l0: the apex collapses onto the inner Soddy center.
inline Tetra fourball_soddy_limit(const Point3& a1, const Point3& a2, const Point3& a3,
                                  const Tolerance& tol = {}) {
  const auto t3 = triangle_to_tangents(distance(a1, a2), distance(a1, a3), distance(a2, a3), tol);
  return Tetra::degenerate(a1, a2, a3, soddy_inner(a1, a2, a3, t3, tol).center);
}

/// D3 of the sextuple (a, b, c, k - a, k - b, k - c); quadratic in k.
inline double d3_profile(double a, double b, double c, double k) {
  if (!(k > std::max({a, b, c}))) throw Error(Errc::OutOfDomain, "k must exceed every face side");
  return cayley_menger_blumenthal(EdgeSextuple(a, b, c, k - a, k - b, k - c));
}

struct ConeBuild {
  Tetra tetra;
  /// Tangent lengths at the three non-apex vertices, apex tangent length fixed to 1.
  std::array<double, 3> l{};
  int iterations = 0;
  double residual = 0.0;
};

/**
 * @brief The 4-ball tetrahedron inscribed in a triangular cone.
 *
 * Apex at the origin with tangent length 1; vertex i sits at (1 + l_i) u_i.
 * Damped Newton on the edge equations |(1+li) ui - (1+lj) uj| = li + lj,
 * with steps clamped to keep every l_i positive.
 */
inline ConeBuild fourball_from_cone(const Vec3& u2, const Vec3& u3, const Vec3& u4,
                                    std::array<double, 3> initial = {1.0, 1.0, 1.0},
                                    const Tolerance& tol = {}) {
  const std::array<Vec3, 3> u{normalize(u2, tol), normalize(u3, tol), normalize(u4, tol)};
  if (std::fabs(triple(u[0], u[1], u[2])) <= tol.eps(1.0)) {
    throw Error(Errc::DegenerateInput, "cone directions are coplanar");
  }
  for (double v : initial) {
    if (!(v > 0)) throw Error(Errc::OutOfDomain, "initial tangent lengths must be positive");
  }
  constexpr std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};

  auto residuals = [&](const std::array<double, 3>& l) {
    std::array<double, 3> f{};
    for (std::size_t p = 0; p < 3; ++p) {
      const auto [i, j] = pairs[p];
      const Vec3 w = u[static_cast<std::size_t>(i)] * (1.0 + l[static_cast<std::size_t>(i)]) -
                     u[static_cast<std::size_t>(j)] * (1.0 + l[static_cast<std::size_t>(j)]);
      f[p] = norm(w) - (l[static_cast<std::size_t>(i)] + l[static_cast<std::size_t>(j)]);
    }
    return f;
  };
  auto max_abs = [](const std::array<double, 3>& f) {
    return std::max({std::fabs(f[0]), std::fabs(f[1]), std::fabs(f[2])});
  };

  // Squared, each tangency condition reads y_i y_j = |u_i - u_j|^2 / 4 with y = l / (1 + l).
  // Newton runs on the logarithm of that form in x = log l, then the distance residual is checked.
  std::array<double, 3> target{};
  for (std::size_t p = 0; p < 3; ++p) {
    const auto [i, j] = pairs[p];
    const Vec3 chord = u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(j)];
    target[p] = std::log(0.25 * dot(chord, chord));
  }
  auto log_residuals = [&](const std::array<double, 3>& l) {
    std::array<double, 3> g{};
    for (std::size_t p = 0; p < 3; ++p) {
      const auto [i, j] = pairs[p];
      const double li = l[static_cast<std::size_t>(i)], lj = l[static_cast<std::size_t>(j)];
      g[p] = std::log(li) - std::log1p(li) + std::log(lj) - std::log1p(lj) - target[p];
    }
    return g;
  };
  auto sumsq = [](const std::array<double, 3>& g) { return g[0] * g[0] + g[1] * g[1] + g[2] * g[2]; };

  std::array<double, 3> l = initial;
  auto g = log_residuals(l);
  constexpr int kMaxIter = 200;
  int iter = 0;
  bool diverged = false;
  for (; iter < kMaxIter; ++iter) {
    if (max_abs(g) <= 1e-15) break;
    std::array<Vec3, 3> cols{Vec3{0, 0, 0}, Vec3{0, 0, 0}, Vec3{0, 0, 0}};
    for (std::size_t p = 0; p < 3; ++p) {
      const auto [i, j] = pairs[p];
      for (int k : {i, j}) {
        const auto sk = static_cast<std::size_t>(k);
        (p == 0 ? cols[sk].x : p == 1 ? cols[sk].y : cols[sk].z) = 1.0 / (1.0 + l[sk]);
      }
    }
    const auto step = solve3(cols[0], cols[1], cols[2], Vec3{-g[0], -g[1], -g[2]}, 1e-300);
    if (!step) break;
    std::array<double, 3> dx{(*step)[0], (*step)[1], (*step)[2]};
    const double longest = std::max({std::fabs(dx[0]), std::fabs(dx[1]), std::fabs(dx[2])});
    if (longest > 2.0) {
      for (auto& d : dx) d *= 2.0 / longest;
    }
    const double m0 = sumsq(g);
    double alpha = 1.0;
    std::array<double, 3> trial{};
    std::array<double, 3> gtrial{};
    for (;;) {
      for (std::size_t c = 0; c < 3; ++c) trial[c] = l[c] * std::exp(alpha * dx[c]);
      gtrial = log_residuals(trial);
      if (sumsq(gtrial) < (1.0 - 1e-4 * alpha) * m0 || alpha < 1e-12) break;
      alpha *= 0.5;
    }
    if (alpha < 1e-12) break;
    l = trial;
    g = gtrial;
    const double top = *std::max_element(l.begin(), l.end());
    if (!std::isfinite(top) || top > 1e12) {
      diverged = true;
      break;
    }
  }
  const auto f = residuals(l);
  const double scale = std::max(1.0, *std::max_element(l.begin(), l.end()));
  if (diverged || !(max_abs(f) <= 1e-12 * scale)) {
    throw Error(Errc::NotConstructible,
                "cone admits no 4-ball tetrahedron (Newton did not converge to positive tangent lengths)");
  }
  const Point3 apex{0, 0, 0};
  ConeBuild out{Tetra(apex, u[0] * (1.0 + l[0]), u[1] * (1.0 + l[1]), u[2] * (1.0 + l[2]), tol), l,
                iter, max_abs(f)};
  return out;
}

}  // namespace tetsum
