#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

#include "tetsum/geom_core.hpp"

namespace tetsum {

/**
 * Edge labeling used throughout the library (vertices P1..P4, zero-based
 * index 0..3 in code):
 *
 *   a = |P1P2|   b = |P2P3|   c = |P1P3|
 *   d = |P3P4|   e = |P1P4|   f = |P2P4|
 *
 * Opposite pairs are (a,d), (b,e), (c,f); the face P1P2P3 carries a, b, c
 * and d, e, f are the edges opposite to them. This is the row layout of the
 * bordered Cayley-Menger matrix.
 */
enum class Edge { a = 0, b, c, d, e, f };

inline constexpr std::array<std::pair<int, int>, 6> kEdgeVertices{{
    {0, 1}, {1, 2}, {0, 2}, {2, 3}, {0, 3}, {1, 3}}};

inline constexpr std::array<char, 6> kEdgeNames{'a', 'b', 'c', 'd', 'e', 'f'};

/// Index of the edge opposite to edge `i` (a<->d, b<->e, c<->f).
constexpr int opposite_edge(int i) { return (i + 3) % 6; }

/// Edge index joining vertices i and j.
constexpr int edge_index(int i, int j) {
  if (i > j) std::swap(i, j);
  for (int k = 0; k < 6; ++k) {
    if (kEdgeVertices[k].first == i && kEdgeVertices[k].second == j) return k;
  }
  return -1;
}

struct EdgeSextuple {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;

  EdgeSextuple() = default;
  EdgeSextuple(double a_, double b_, double c_, double d_, double e_, double f_)
      : a(a_), b(b_), c(c_), d(d_), e(e_), f(f_) {
    for (double v : as_array()) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(Errc::DegenerateInput, "edge lengths must be positive and finite");
      }
    }
  }

  std::array<double, 6> as_array() const { return {a, b, c, d, e, f}; }
  double operator[](int i) const { return as_array()[static_cast<std::size_t>(i)]; }
  double between(int i, int j) const { return (*this)[edge_index(i, j)]; }
  double max_edge() const {
    const auto arr = as_array();
    return *std::max_element(arr.begin(), arr.end());
  }
  /// a+d, b+e, c+f.
  std::array<double, 3> opposite_sums() const { return {a + d, b + e, c + f}; }

  bool operator==(const EdgeSextuple&) const = default;
};

/// Face k is the face opposite vertex k; returns its three vertex indices in increasing order.
constexpr std::array<int, 3> face_vertices(int k) {
  std::array<int, 3> out{};
  int n = 0;
  for (int i = 0; i < 4; ++i) {
    if (i != k) out[static_cast<std::size_t>(n++)] = i;
  }
  return out;
}

/**
 * @brief Four labeled vertices.
 *
 * The regular constructor rejects zero-volume input; Tetra::degenerate
 * admits flat configurations (the Soddy limit of a 4-ball tetrahedron).
 */
class Tetra {
 public:
  Tetra(const Point3& p1, const Point3& p2, const Point3& p3, const Point3& p4,
        const Tolerance& tol = {})
      : v_{p1, p2, p3, p4} {
    if (std::fabs(signed_volume()) <= tol.abs) {
      throw Error(Errc::DegenerateInput, "tetrahedron has zero volume");
    }
  }

  explicit Tetra(const std::array<Point3, 4>& v, const Tolerance& tol = {})
      : Tetra(v[0], v[1], v[2], v[3], tol) {}

  static Tetra degenerate(const Point3& p1, const Point3& p2, const Point3& p3, const Point3& p4) {
    return Tetra(std::array<Point3, 4>{p1, p2, p3, p4}, DegenerateTag{});
  }

  const Point3& operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  const std::array<Point3, 4>& vertices() const { return v_; }

  double signed_volume() const { return triple(v_[1] - v_[0], v_[2] - v_[0], v_[3] - v_[0]) / 6.0; }

  /// Same vertex set, reordered as (P[o0], P[o1], P[o2], P[o3]).
  Tetra permuted(const std::array<int, 4>& order) const {
    return Tetra(std::array<Point3, 4>{v_[static_cast<std::size_t>(order[0])],
                                       v_[static_cast<std::size_t>(order[1])],
                                       v_[static_cast<std::size_t>(order[2])],
                                       v_[static_cast<std::size_t>(order[3])]},
                 DegenerateTag{});
  }

 private:
  struct DegenerateTag {};
  Tetra(const std::array<Point3, 4>& v, DegenerateTag) : v_(v) {}

  std::array<Point3, 4> v_;
};

inline EdgeSextuple edge_sextuple(const Tetra& t) {
  std::array<double, 6> len{};
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kEdgeVertices[static_cast<std::size_t>(k)];
    len[static_cast<std::size_t>(k)] = distance(t[i], t[j]);
  }
  return {len[0], len[1], len[2], len[3], len[4], len[5]};
}

inline double volume(const Tetra& t) { return std::fabs(t.signed_volume()); }

inline double max_edge_length(const Tetra& t) { return edge_sextuple(t).max_edge(); }

inline double triangle_area(const Point3& p, const Point3& q, const Point3& r) {
  return 0.5 * norm(cross(q - p, r - p));
}

inline double face_area(const Tetra& t, int k) {
  const auto f = face_vertices(k);
  return triangle_area(t[f[0]], t[f[1]], t[f[2]]);
}

/// Bordered 5x5 Cayley-Menger determinant, by Gaussian elimination with partial pivoting.
inline double cayley_menger_d3(const EdgeSextuple& s) {
  const double a2 = s.a * s.a, b2 = s.b * s.b, c2 = s.c * s.c;
  const double d2 = s.d * s.d, e2 = s.e * s.e, f2 = s.f * s.f;
  std::array<std::array<double, 5>, 5> m{{
      {0, 1, 1, 1, 1},
      {1, 0, a2, c2, e2},
      {1, a2, 0, b2, f2},
      {1, c2, b2, 0, d2},
      {1, e2, f2, d2, 0},
  }};
  double det = 1.0;
  for (std::size_t col = 0; col < 5; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < 5; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    }
    if (m[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < 5; ++r) {
      const double factor = m[r][col] / m[col][col];
      for (std::size_t k = col; k < 5; ++k) m[r][k] -= factor * m[col][k];
    }
  }
  return det;
}

/// The same determinant via the 3x3 Gram expansion anchored at P1.
inline double cayley_menger_blumenthal(const EdgeSextuple& s) {
  const double a2 = s.a * s.a, b2 = s.b * s.b, c2 = s.c * s.c;
  const double d2 = s.d * s.d, e2 = s.e * s.e, f2 = s.f * s.f;
  const double p = a2 + c2 - b2;
  const double q = c2 + e2 - d2;
  const double r = a2 + e2 - f2;
  return 2.0 * (4.0 * a2 * c2 * e2 + p * q * r - a2 * q * q - c2 * r * r - e2 * p * p);
}

enum class Existence { Yes, NoTriangle, NoEmbedding };

struct ExistenceResult {
  Existence status = Existence::Yes;
  /// Face (opposite-vertex index) that violates a triangle inequality, for NoTriangle.
  int face = -1;
  double d3 = 0.0;

  bool ok() const { return status == Existence::Yes; }
};

inline std::string_view to_string(Existence e) {
  switch (e) {
    case Existence::Yes: return "Yes";
    case Existence::NoTriangle: return "NoTriangle";
    case Existence::NoEmbedding: return "NoEmbedding";
  }
  return "?";
}

/**
 * Six lengths form a tetrahedron iff every face satisfies the strict
 * triangle inequalities and D3 > 0. The two failures are independent and
 * reported separately. Sign tests on D3 use abs * L^6 as the zero band.
 */
inline ExistenceResult tetra_exists(const EdgeSextuple& s, const Tolerance& tol = {}) {
  ExistenceResult out;
  out.d3 = cayley_menger_d3(s);
  for (int k = 0; k < 4; ++k) {
    const auto f = face_vertices(k);
    const double x = s.between(f[0], f[1]);
    const double y = s.between(f[1], f[2]);
    const double z = s.between(f[0], f[2]);
    const double slack = tol.eps(std::max({x, y, z}));
    if (x >= y + z - slack || y >= x + z - slack || z >= x + y - slack) {
      out.status = Existence::NoTriangle;
      out.face = k;
      return out;
    }
  }
  const double l = s.max_edge();
  if (out.d3 <= tol.abs * std::pow(l, 6)) out.status = Existence::NoEmbedding;
  return out;
}

/**
 * Canonical placement: P1 at the origin, P2 on +x, P3 in the xy-plane with
 * y > 0, P4 with z > 0.
 */
inline Tetra realize(const EdgeSextuple& s, const Tolerance& tol = {}) {
  const auto ex = tetra_exists(s, tol);
  if (!ex.ok()) {
    throw Error(Errc::NotRealizable, std::string("edge lengths do not form a tetrahedron (") +
                                         std::string(to_string(ex.status)) +
                                         ", D3 = " + std::to_string(ex.d3) + ")");
  }
  const Point3 p1{0, 0, 0};
  const Point3 p2{s.a, 0, 0};
  const double x = (s.a * s.a + s.c * s.c - s.b * s.b) / (2.0 * s.a);
  const Point3 p3{x, std::sqrt(std::max(0.0, s.c * s.c - x * x)), 0};
  const auto apex = trilaterate(p1, p2, p3, s.e, s.f, s.d, tol);
  if (!apex) throw Error(Errc::NotRealizable, "apex placement failed");
  return Tetra(p1, p2, p3, apex->first, tol);
}

/// Outward unit normal of the face opposite vertex k.
inline Vec3 outward_normal(const Tetra& t, int k, const Tolerance& tol = {}) {
  const auto f = face_vertices(k);
  Vec3 n = normalize(cross(t[f[1]] - t[f[0]], t[f[2]] - t[f[0]]), tol);
  if (dot(n, t[k] - t[f[0]]) > 0.0) n = -n;
  return n;
}

inline std::array<Vec3, 4> outward_normals(const Tetra& t, const Tolerance& tol = {}) {
  return {outward_normal(t, 0, tol), outward_normal(t, 1, tol), outward_normal(t, 2, tol),
          outward_normal(t, 3, tol)};
}

/// Interior angle of triangle (p, q, r) at vertex p.
inline double corner_angle(const Point3& p, const Point3& q, const Point3& r) {
  return angle_between(q - p, r - p);
}

struct AngleReport {
  /// Dihedral angle at each edge, indexed a..f, radians.
  std::array<double, 6> dihedral{};
  double sigma = 0.0;
  /// face_angles[k][m]: interior angle of face k at its m-th vertex (face_vertices order).
  std::array<std::array<double, 3>, 4> face_angles{};
  bool nonobtuse = false;
  bool path = false;
  bool equifacial = false;
  bool fourball = false;

  double at(Edge e) const { return dihedral[static_cast<std::size_t>(e)]; }
  /// Dihedral sums over the opposite pairs (a,d), (b,e), (c,f).
  std::array<double, 3> opposite_sums() const {
    return {dihedral[0] + dihedral[3], dihedral[1] + dihedral[4], dihedral[2] + dihedral[5]};
  }
};

inline bool opposite_sums_equal(const EdgeSextuple& s, const Tolerance& tol = {}) {
  const auto sums = s.opposite_sums();
  const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
  return *hi - *lo <= tol.eps(*hi);
}

inline bool is_equifacial(const Tetra& t, const Tolerance& tol = {}) {
  const auto s = edge_sextuple(t);
  const double scale = s.max_edge();
  return tol.equal(s.a, s.d, scale) && tol.equal(s.b, s.e, scale) && tol.equal(s.c, s.f, scale);
}

/// The 12 vertex orderings (O, A, B, C) up to reversal of the path.
inline constexpr std::array<std::array<int, 4>, 12> kPathOrderings{{
    {0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 1, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}, {0, 3, 2, 1},
    {1, 0, 2, 3}, {1, 0, 3, 2}, {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 0, 1, 3}, {2, 1, 0, 3},
}};

inline bool orthogonal(const Vec3& u, const Vec3& v, const Tolerance& tol) {
  return std::fabs(std::numbers::pi / 2 - angle_between(u, v)) <= tol.angle_abs;
}

inline bool is_path_ordering(const Tetra& t, const std::array<int, 4>& o, const Tolerance& tol = {}) {
  const Vec3 oa = t[o[1]] - t[o[0]];
  const Vec3 ab = t[o[2]] - t[o[1]];
  const Vec3 bc = t[o[3]] - t[o[2]];
  return orthogonal(oa, ab, tol) && orthogonal(ab, bc, tol) && orthogonal(oa, bc, tol);
}

/// Returns an ordering (O, A, B, C) whose edges OA, AB, BC are mutually orthogonal.
inline std::optional<std::array<int, 4>> is_path(const Tetra& t, const Tolerance& tol = {}) {
  for (const auto& o : kPathOrderings) {
    if (is_path_ordering(t, o, tol)) return o;
  }
  return std::nullopt;
}

inline AngleReport dihedral_angles(const Tetra& t, const Tolerance& tol = {}) {
  if (volume(t) <= tol.abs) throw Error(Errc::DegenerateInput, "dihedral angles of a flat tetrahedron");
  const auto n = outward_normals(t, tol);
  AngleReport rep;
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kEdgeVertices[static_cast<std::size_t>(k)];
    // The two faces containing edge (i,j) are those opposite the other two vertices.
    int others[2];
    int m = 0;
    for (int v = 0; v < 4; ++v) {
      if (v != i && v != j) others[m++] = v;
    }
    rep.dihedral[static_cast<std::size_t>(k)] =
        std::numbers::pi - angle_between(n[static_cast<std::size_t>(others[0])],
                                         n[static_cast<std::size_t>(others[1])]);
  }
  for (double x : rep.dihedral) rep.sigma += x;
  for (int k = 0; k < 4; ++k) {
    const auto f = face_vertices(k);
    for (int m = 0; m < 3; ++m) {
      rep.face_angles[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] =
          corner_angle(t[f[static_cast<std::size_t>(m)]], t[f[static_cast<std::size_t>((m + 1) % 3)]],
                       t[f[static_cast<std::size_t>((m + 2) % 3)]]);
    }
  }
  rep.nonobtuse = std::all_of(rep.dihedral.begin(), rep.dihedral.end(), [&](double x) {
    return x <= std::numbers::pi / 2 + tol.angle_abs;
  });
  rep.path = is_path(t, tol).has_value();
  rep.equifacial = is_equifacial(t, tol);
  rep.fourball = opposite_sums_equal(edge_sextuple(t), tol);
  return rep;
}

struct Sphere {
  Point3 center;
  double radius = 0.0;
};

/// Inscribed sphere: center weighted by opposite face areas, r = 3V / total area.
inline Sphere insphere(const Tetra& t, const Tolerance& tol = {}) {
  const double vol = volume(t);
  if (vol <= tol.abs) throw Error(Errc::DegenerateInput, "insphere of a flat tetrahedron");
  Vec3 c{0, 0, 0};
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double area = face_area(t, k);
    c += t[k] * area;
    total += area;
  }
  return {c / total, 3.0 * vol / total};
}

inline Sphere circumsphere(const Tetra& t, const Tolerance& tol = {}) {
  if (volume(t) <= tol.abs) throw Error(Errc::DegenerateInput, "circumsphere of a flat tetrahedron");
  // Rows 2(Pi - P1) . x = |Pi - P1|^2 in coordinates relative to P1.
  const Vec3 u = t[1] - t[0];
  const Vec3 v = t[2] - t[0];
  const Vec3 w = t[3] - t[0];
  const Vec3 rhs{dot(u, u), dot(v, v), dot(w, w)};
  // Solve M x = rhs with M rows 2u, 2v, 2w: x = (rhs_0 (v x w) + rhs_1 (w x u) + rhs_2 (u x v)) / (2 det).
  const double det = triple(u, v, w);
  const Vec3 x = (cross(v, w) * rhs.x + cross(w, u) * rhs.y + cross(u, v) * rhs.z) / (2.0 * det);
  return {t[0] + x, norm(x)};
}

/// Barycentric coordinates of p with respect to t.
inline std::array<double, 4> barycentric(const Tetra& t, const Point3& p) {
  const double total = t.signed_volume();
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) {
    std::array<Point3, 4> v = t.vertices();
    v[static_cast<std::size_t>(k)] = p;
    out[static_cast<std::size_t>(k)] = Tetra::degenerate(v[0], v[1], v[2], v[3]).signed_volume() / total;
  }
  return out;
}

}  // namespace tetsum
