#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tetsum/fourball.hpp"
#include "tetsum/geom_core.hpp"
#include "tetsum/tet_metrics.hpp"

namespace tetsum {

enum class PartitionKind { fourball24, red8 };

inline std::string_view to_string(PartitionKind k) {
  return k == PartitionKind::fourball24 ? "fourball24" : "red8";
}

struct Partition {
  Tetra parent;
  std::vector<Tetra> cells;
  PartitionKind kind;
};

/// Cells are stored with positive signed volume.
inline Tetra oriented_cell(const Point3& p, const Point3& q, const Point3& r, const Point3& s,
                           const Tolerance& tol = {}) {
  if (triple(q - p, r - p, s - p) < 0.0) return Tetra(p, q, s, r, tol);
  return Tetra(p, q, r, s, tol);
}

/**
 * @brief Split a 4-ball tetrahedron into 24 path tetrahedra.
 *
 * Each face is cut into six right triangles (vertex, edge tangency point,
 * face incenter); every triangle is coned to the midsphere center G. The
 * path of each cell is vertex -> tangency point -> incenter -> G.
 */
inline Partition partition_fourball_24(const Tetra& t, const Tolerance& tol = {}) {
  if (!is_fourball(t, tol)) throw Error(Errc::NotFourBall, "opposite edge sums differ");
  const auto ms = midsphere(t, tol);
  if (ms.location != CenterLocation::Interior) {
    throw Error(Errc::CenterNotInterior,
                std::string("midsphere center is ") + std::string(to_string(ms.location)) +
                    " (boundary centers admit only the 18-cell split, which is not constructed)");
  }
  const auto l = fourball_tangents(t, tol);
  std::array<std::array<Point3, 4>, 4> touch{};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const Point3 p = tangency_point(t, l, i, j);
      touch[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = p;
      touch[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = p;
    }
  }
  Partition out{t, {}, PartitionKind::fourball24};
  out.cells.reserve(24);
  for (int k = 0; k < 4; ++k) {
    const auto f = face_vertices(k);
    const Point3 incenter = face_incircle(t, k).center;
    for (int v : f) {
      for (int w : f) {
        if (v == w) continue;
        out.cells.push_back(oriented_cell(
            t[v], touch[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)], incenter, ms.center, tol));
      }
    }
  }
  return out;
}

/**
 * Red refinement of the path tetrahedron O, A, B, C (OA, AB, BC mutually
 * orthogonal): four corner cells plus the inner octahedron cut along the
 * diagonal joining the midpoints of OB and AC.
 */
inline Partition red_refine_path(const Tetra& t, const std::array<int, 4>& ordering,
                                 const Tolerance& tol = {}) {
  if (!is_path_ordering(t, ordering, tol)) throw Error(Errc::NotPath, "ordering is not an orthogonal path");
  const Point3& o = t[ordering[0]];
  const Point3& a = t[ordering[1]];
  const Point3& b = t[ordering[2]];
  const Point3& c = t[ordering[3]];
  auto mid = [](const Point3& p, const Point3& q) { return (p + q) * 0.5; };
  const Point3 oa = mid(o, a), ob = mid(o, b), oc = mid(o, c);
  const Point3 ab = mid(a, b), ac = mid(a, c), bc = mid(b, c);

  Partition out{t, {}, PartitionKind::red8};
  out.cells = {
      oriented_cell(o, oa, ob, oc, tol),  oriented_cell(a, oa, ab, ac, tol),
      oriented_cell(b, ob, ab, bc, tol),  oriented_cell(c, oc, ac, bc, tol),
      oriented_cell(ob, ac, oa, ab, tol), oriented_cell(ob, ac, ab, bc, tol),
      oriented_cell(ob, ac, bc, oc, tol), oriented_cell(ob, ac, oc, oa, tol),
  };
  return out;
}

/// Red refinement of every cell, each cell's path found by is_path.
inline Partition red_refine_all(const Partition& p, const Tolerance& tol = {}) {
  Partition out{p.parent, {}, PartitionKind::red8};
  out.cells.reserve(p.cells.size() * 8);
  for (const auto& cell : p.cells) {
    const auto order = is_path(cell, tol);
    if (!order) throw Error(Errc::NotPath, "cell is not a path tetrahedron");
    const auto sub = red_refine_path(cell, *order, tol);
    out.cells.insert(out.cells.end(), sub.cells.begin(), sub.cells.end());
  }
  return out;
}

struct ConformityReport {
  bool is_face_to_face = false;
  double volume_residual = 0.0;
  /// Offending cells (second is -1 when a single cell is at fault).
  std::pair<int, int> worst_pair{-1, -1};
  std::string violation;
  /// Unshared cell faces lying on each parent face.
  std::array<int, 4> boundary_faces{};
  std::size_t unique_vertices = 0;
};

/// Cell vertices merged into a shared point list with tolerance matching.
struct IndexedCells {
  std::vector<Point3> points;
  std::vector<std::array<int, 4>> cells;
};

inline IndexedCells index_cells(const std::vector<Tetra>& cells, double merge_tol) {
  IndexedCells out;
  out.cells.reserve(cells.size());
  for (const auto& cell : cells) {
    std::array<int, 4> idx{};
    for (int m = 0; m < 4; ++m) {
      const Point3& p = cell[m];
      int found = -1;
      for (std::size_t q = 0; q < out.points.size(); ++q) {
        if (distance(out.points[q], p) <= merge_tol) {
          found = static_cast<int>(q);
          break;
        }
      }
      if (found < 0) {
        found = static_cast<int>(out.points.size());
        out.points.push_back(p);
      }
      idx[static_cast<std::size_t>(m)] = found;
    }
    out.cells.push_back(idx);
  }
  return out;
}

/**
 * Certifies a conforming tiling by vertex identity: every cell positively
 * oriented and inside the parent, every cell face either shared by exactly
 * two cells lying on opposite sides or lying on a parent face, the unshared
 * faces covering each parent face's area, and volumes summing to the parent.
 */
inline ConformityReport validate_conformity(const Partition& p, const Tolerance& tol = {}) {
  ConformityReport rep;
  const double scale = max_edge_length(p.parent);
  const double len_tol = tol.eps(scale);
  const double parent_vol = volume(p.parent);

  double vol_sum = 0.0;
  for (const auto& c : p.cells) vol_sum += volume(c);
  rep.volume_residual = std::fabs(vol_sum - parent_vol) / parent_vol;

  auto fail = [&rep](int c1, int c2, std::string why) {
    if (rep.violation.empty()) {
      rep.worst_pair = {c1, c2};
      rep.violation = std::move(why);
    }
  };

  const auto indexed = index_cells(p.cells, len_tol);
  rep.unique_vertices = indexed.points.size();
  const auto& pts = indexed.points;

  std::array<Plane, 4> parent_planes;
  for (int k = 0; k < 4; ++k) {
    const auto f = face_vertices(k);
    parent_planes[static_cast<std::size_t>(k)] = Plane::through(p.parent[f[0]], p.parent[f[1]], p.parent[f[2]], tol);
  }

  struct Incidence {
    int cell;
    int apex;
  };
  std::map<std::array<int, 3>, std::vector<Incidence>> faces;
  for (std::size_t ci = 0; ci < indexed.cells.size(); ++ci) {
    const auto& idx = indexed.cells[ci];
    const int c = static_cast<int>(ci);
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(c, -1, "cell has coincident vertices");
      continue;
    }
    if (p.cells[ci].signed_volume() <= tol.abs) fail(c, -1, "cell is not positively oriented");
    for (int m = 0; m < 4; ++m) {
      const auto bc = barycentric(p.parent, p.cells[ci][m]);
      if (*std::min_element(bc.begin(), bc.end()) < -tol.rel) fail(c, -1, "cell vertex outside parent");
    }
    for (int k = 0; k < 4; ++k) {
      const auto fv = face_vertices(k);
      std::array<int, 3> key{idx[static_cast<std::size_t>(fv[0])], idx[static_cast<std::size_t>(fv[1])],
                             idx[static_cast<std::size_t>(fv[2])]};
      std::sort(key.begin(), key.end());
      faces[key].push_back({c, idx[static_cast<std::size_t>(k)]});
    }
  }

  std::array<double, 4> covered{};
  for (const auto& [key, inc] : faces) {
    const Point3& p0 = pts[static_cast<std::size_t>(key[0])];
    const Point3& p1 = pts[static_cast<std::size_t>(key[1])];
    const Point3& p2 = pts[static_cast<std::size_t>(key[2])];
    if (inc.size() == 1) {
      int on_face = -1;
      for (int k = 0; k < 4; ++k) {
        const auto& pl = parent_planes[static_cast<std::size_t>(k)];
        if (std::fabs(pl.signed_distance(p0)) <= len_tol && std::fabs(pl.signed_distance(p1)) <= len_tol &&
            std::fabs(pl.signed_distance(p2)) <= len_tol) {
          on_face = k;
          break;
        }
      }
      if (on_face < 0) {
        fail(inc[0].cell, -1, "interior cell face is not shared by a neighbor");
      } else {
        covered[static_cast<std::size_t>(on_face)] += triangle_area(p0, p1, p2);
        ++rep.boundary_faces[static_cast<std::size_t>(on_face)];
      }
    } else if (inc.size() == 2) {
      const Vec3 n = cross(p1 - p0, p2 - p0);
      const double s1 = dot(n, pts[static_cast<std::size_t>(inc[0].apex)] - p0);
      const double s2 = dot(n, pts[static_cast<std::size_t>(inc[1].apex)] - p0);
      if (s1 * s2 >= 0.0) fail(inc[0].cell, inc[1].cell, "cells overlap across a shared face");
    } else {
      fail(inc[0].cell, inc[1].cell, "face shared by more than two cells");
    }
  }
  for (int k = 0; k < 4; ++k) {
    const double area = face_area(p.parent, k);
    if (std::fabs(covered[static_cast<std::size_t>(k)] - area) > tol.rel * area) {
      fail(-1, -1, "parent face " + std::to_string(k) + " is not covered by cell faces");
    }
  }
  if (rep.volume_residual > tol.rel) fail(-1, -1, "cell volumes do not sum to the parent volume");

  rep.is_face_to_face = rep.violation.empty();
  return rep;
}

}  // namespace tetsum
