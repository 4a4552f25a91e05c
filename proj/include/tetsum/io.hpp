#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "tetsum/bounds.hpp"
#include "tetsum/geom_core.hpp"
#include "tetsum/partition.hpp"
#include "tetsum/tet_metrics.hpp"

namespace tetsum::io {

using nlohmann::json;

/// Shortest decimal form that round-trips exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Fixed-point with `digits` decimals.
inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/**
 * @brief A tetrahedron given by vertices or by its edge sextuple.
 *
 * Exactly one of `vertices` and `edges` is present. Tolerance fields
 * override the caller's defaults when set.
 */
struct TetraDocument {
  std::optional<std::array<Point3, 4>> vertices;
  std::optional<EdgeSextuple> edges;
  std::string label;
  std::optional<double> tol_rel;
  std::optional<double> tol_abs;
  std::optional<double> tol_angle;

  bool operator==(const TetraDocument&) const = default;

  Tolerance tolerance(const Tolerance& base = {}) const {
    return Tolerance(tol_rel.value_or(base.rel), tol_abs.value_or(base.abs), tol_angle.value_or(base.angle_abs));
  }

  /// Vertices as given, or a realization of the edges (throws NotRealizable).
  Tetra tetra(const Tolerance& tol) const {
    if (vertices) return Tetra(*vertices, tol);
    return realize(*edges, tol);
  }

  static TetraDocument from_tetra(const Tetra& t, std::string label = {}) {
    TetraDocument doc;
    doc.vertices = t.vertices();
    doc.label = std::move(label);
    return doc;
  }
};

namespace detail {

inline Error parse_error(const std::string& field, const std::string& what) {
  return Error(Errc::ParseError, "field '" + field + "': " + what);
}

inline double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw parse_error(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw parse_error(field, "expected a finite number");
  return v;
}

inline Point3 point_at(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw parse_error(field, "expected [x, y, z]");
  return {number_at(j[0], field + "[0]"), number_at(j[1], field + "[1]"), number_at(j[2], field + "[2]")};
}

inline json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                      ": malformed JSON");
  }
}

inline json point_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

}  // namespace detail

inline json to_json(const TetraDocument& doc) {
  json j = json::object();
  if (!doc.label.empty()) j["label"] = doc.label;
  if (doc.vertices) {
    j["vertices"] = json::array();
    for (const auto& p : *doc.vertices) j["vertices"].push_back(detail::point_json(p));
  }
  if (doc.edges) {
    const auto arr = doc.edges->as_array();
    j["edges"] = json::object();
    for (std::size_t k = 0; k < 6; ++k) j["edges"][std::string(1, kEdgeNames[k])] = arr[k];
  }
  if (doc.tol_rel || doc.tol_abs || doc.tol_angle) {
    json t = json::object();
    if (doc.tol_rel) t["rel"] = *doc.tol_rel;
    if (doc.tol_abs) t["abs"] = *doc.tol_abs;
    if (doc.tol_angle) t["angle_abs"] = *doc.tol_angle;
    j["tolerance"] = t;
  }
  return j;
}

inline TetraDocument tetra_document_from_json(const json& j) {
  if (!j.is_object()) throw detail::parse_error("<root>", "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "label" && key != "vertices" && key != "edges" && key != "tolerance") {
      throw detail::parse_error(key, "unknown field");
    }
  }
  TetraDocument doc;
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw detail::parse_error("label", "expected a string");
    doc.label = j["label"].get<std::string>();
  }
  const bool has_v = j.contains("vertices"), has_e = j.contains("edges");
  if (has_v == has_e) throw detail::parse_error("vertices/edges", "exactly one of the two must be present");
  if (has_v) {
    const auto& v = j["vertices"];
    if (!v.is_array() || v.size() != 4) throw detail::parse_error("vertices", "expected four points");
    std::array<Point3, 4> pts;
    for (std::size_t i = 0; i < 4; ++i) pts[i] = detail::point_at(v[i], "vertices[" + std::to_string(i) + "]");
    doc.vertices = pts;
  } else {
    const auto& e = j["edges"];
    if (!e.is_object()) throw detail::parse_error("edges", "expected an object with keys a..f");
    std::array<double, 6> len{};
    for (std::size_t k = 0; k < 6; ++k) {
      const std::string key(1, kEdgeNames[k]);
      if (!e.contains(key)) throw detail::parse_error("edges." + key, "missing");
      len[k] = detail::number_at(e[key], "edges." + key);
      if (!(len[k] > 0)) throw detail::parse_error("edges." + key, "must be positive");
    }
    if (e.size() != 6) throw detail::parse_error("edges", "unexpected extra keys");
    doc.edges = EdgeSextuple(len[0], len[1], len[2], len[3], len[4], len[5]);
  }
  if (j.contains("tolerance")) {
    const auto& t = j["tolerance"];
    if (!t.is_object()) throw detail::parse_error("tolerance", "expected an object");
    auto read = [&](const char* key, std::optional<double>& dst) {
      if (!t.contains(key)) return;
      const double v = detail::number_at(t[key], std::string("tolerance.") + key);
      if (!(v > 0)) throw detail::parse_error(std::string("tolerance.") + key, "must be positive");
      dst = v;
    };
    read("rel", doc.tol_rel);
    read("abs", doc.tol_abs);
    read("angle_abs", doc.tol_angle);
  }
  return doc;
}

inline TetraDocument parse_tetra_document(std::string_view text) {
  return tetra_document_from_json(detail::parse_text(text));
}

inline std::string emit(const TetraDocument& doc) { return to_json(doc).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Meshes.

struct MeshProvenance {
  std::string parent;
  std::string kind;
  std::optional<std::uint64_t> seed;

  bool operator==(const MeshProvenance&) const = default;
};

struct MeshDocument {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 4>> cells;
  MeshProvenance provenance;

  bool operator==(const MeshDocument&) const = default;

  std::vector<Tetra> tetras(const Tolerance& tol = {}) const {
    std::vector<Tetra> out;
    out.reserve(cells.size());
    for (const auto& c : cells) {
      out.emplace_back(vertices.at(static_cast<std::size_t>(c[0])), vertices.at(static_cast<std::size_t>(c[1])),
                       vertices.at(static_cast<std::size_t>(c[2])), vertices.at(static_cast<std::size_t>(c[3])), tol);
    }
    return out;
  }
};

/// Checks index range and that no two vertices coincide within merge_tol.
inline void validate_mesh(const MeshDocument& m, double merge_tol) {
  const int nv = static_cast<int>(m.vertices.size());
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    for (int i : m.cells[c]) {
      if (i < 0 || i >= nv) throw Error(Errc::ParseError, "cell " + std::to_string(c) + " index out of range");
    }
  }
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < m.vertices.size(); ++j) {
      if (distance(m.vertices[i], m.vertices[j]) <= merge_tol) {
        throw Error(Errc::ParseError, "vertices " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

namespace detail {

inline bool point_less(const Point3& p, const Point3& q) {
  return std::tie(p.x, p.y, p.z) < std::tie(q.x, q.y, q.z);
}

}  // namespace detail

/**
 * Shared-vertex mesh of a partition. Cells are ordered lexicographically by
 * their vertex coordinates (first vertex first) and vertices are numbered in
 * order of first use, so the output is independent of how it was produced.
 */
inline MeshDocument make_mesh(const Partition& p, const Tolerance& tol = {}, std::string parent = {},
                              std::optional<std::uint64_t> seed = std::nullopt) {
  std::vector<Tetra> cells = p.cells;
  std::stable_sort(cells.begin(), cells.end(), [](const Tetra& s, const Tetra& t) {
    for (int m = 0; m < 4; ++m) {
      if (detail::point_less(s[m], t[m])) return true;
      if (detail::point_less(t[m], s[m])) return false;
    }
    return false;
  });
  const auto indexed = index_cells(cells, tol.eps(max_edge_length(p.parent)));
  MeshDocument m;
  m.vertices = indexed.points;
  m.cells = indexed.cells;
  m.provenance = {std::move(parent), std::string(to_string(p.kind)), seed};
  return m;
}

inline json to_json(const MeshDocument& m) {
  json j = json::object();
  j["vertices"] = json::array();
  for (const auto& p : m.vertices) j["vertices"].push_back(detail::point_json(p));
  j["cells"] = json::array();
  for (const auto& c : m.cells) j["cells"].push_back(json::array({c[0], c[1], c[2], c[3]}));
  json prov = json::object();
  prov["parent"] = m.provenance.parent;
  prov["kind"] = m.provenance.kind;
  if (m.provenance.seed) prov["seed"] = *m.provenance.seed;
  j["provenance"] = prov;
  return j;
}

inline MeshDocument mesh_document_from_json(const json& j) {
  if (!j.is_object()) throw detail::parse_error("<root>", "expected an object");
  MeshDocument m;
  if (!j.contains("vertices") || !j["vertices"].is_array()) throw detail::parse_error("vertices", "expected an array");
  for (std::size_t i = 0; i < j["vertices"].size(); ++i) {
    m.vertices.push_back(detail::point_at(j["vertices"][i], "vertices[" + std::to_string(i) + "]"));
  }
  if (!j.contains("cells") || !j["cells"].is_array()) throw detail::parse_error("cells", "expected an array");
  for (std::size_t c = 0; c < j["cells"].size(); ++c) {
    const auto& cj = j["cells"][c];
    const std::string field = "cells[" + std::to_string(c) + "]";
    if (!cj.is_array() || cj.size() != 4) throw detail::parse_error(field, "expected four indices");
    std::array<int, 4> idx{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!cj[k].is_number_integer()) throw detail::parse_error(field, "expected integer indices");
      idx[k] = cj[k].get<int>();
    }
    m.cells.push_back(idx);
  }
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    if (!p.is_object()) throw detail::parse_error("provenance", "expected an object");
    if (p.contains("parent")) m.provenance.parent = p["parent"].get<std::string>();
    if (p.contains("kind")) m.provenance.kind = p["kind"].get<std::string>();
    if (p.contains("seed")) {
      if (!p["seed"].is_number_unsigned()) throw detail::parse_error("provenance.seed", "expected a non-negative integer");
      m.provenance.seed = p["seed"].get<std::uint64_t>();
    }
  }
  validate_mesh(m, 0.0);
  return m;
}

inline MeshDocument parse_mesh_document(std::string_view text) {
  return mesh_document_from_json(detail::parse_text(text));
}

inline std::string emit(const MeshDocument& m) { return to_json(m).dump(2) + "\n"; }

/// OFF with tetrahedral cells: header, "nv nc 0", vertices, then "4 i j k l".
inline void write_off(std::ostream& os, const MeshDocument& m) {
  os << "OFF\n" << m.vertices.size() << ' ' << m.cells.size() << " 0\n";
  for (const auto& p : m.vertices) {
    os << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
  }
  for (const auto& c : m.cells) os << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
}

inline MeshDocument read_off(std::istream& is) {
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  std::vector<int> token_line;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      tokens.push_back(tok);
      token_line.push_back(lineno);
    }
  }
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) {
    const int at = pos < token_line.size() ? token_line[pos] : lineno;
    return Error(Errc::ParseError, "OFF line " + std::to_string(at) + ": " + what);
  };
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw fail("unexpected end of file");
    return tokens[pos++];
  };
  auto next_long = [&]() {
    const std::string& t = next();
    try {
      std::size_t used = 0;
      const long v = std::stol(t, &used);
      if (used != t.size()) throw fail("expected an integer, got '" + t + "'");
      return v;
    } catch (const std::logic_error&) {
      --pos;
      throw fail("expected an integer, got '" + t + "'");
    }
  };
  auto next_double = [&]() {
    const std::string& t = next();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw fail("expected a number, got '" + t + "'");
      return v;
    } catch (const std::logic_error&) {
      --pos;
      throw fail("expected a number, got '" + t + "'");
    }
  };
  if (next() != "OFF") throw Error(Errc::ParseError, "OFF line 1: missing OFF header");
  const long nv = next_long(), nc = next_long();
  next_long();
  if (nv < 0 || nc < 0) throw fail("negative counts");
  MeshDocument m;
  for (long i = 0; i < nv; ++i) {
    const double x = next_double(), y = next_double(), z = next_double();
    m.vertices.emplace_back(x, y, z);
  }
  for (long c = 0; c < nc; ++c) {
    if (next_long() != 4) throw fail("only tetrahedral cells (4 indices) are supported");
    std::array<int, 4> idx{};
    for (auto& i : idx) i = static_cast<int>(next_long());
    m.cells.push_back(idx);
  }
  validate_mesh(m, 0.0);
  return m;
}

/// Boundary triangles of the mesh as a Wavefront OBJ surface, outward oriented.
inline void write_obj_surface(std::ostream& os, const MeshDocument& m) {
  std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> faces;
  for (std::size_t c = 0; c < m.cells.size(); ++c) {
    const auto& idx = m.cells[c];
    for (int k = 0; k < 4; ++k) {
      const auto fv = face_vertices(k);
      std::array<int, 3> tri{idx[static_cast<std::size_t>(fv[0])], idx[static_cast<std::size_t>(fv[1])],
                             idx[static_cast<std::size_t>(fv[2])]};
      const auto& v = m.vertices;
      const Vec3 n = cross(v[static_cast<std::size_t>(tri[1])] - v[static_cast<std::size_t>(tri[0])],
                           v[static_cast<std::size_t>(tri[2])] - v[static_cast<std::size_t>(tri[0])]);
      if (dot(n, v[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] - v[static_cast<std::size_t>(tri[0])]) > 0) {
        std::swap(tri[1], tri[2]);
      }
      auto key = tri;
      std::sort(key.begin(), key.end());
      auto& slot = faces[key];
      ++slot.first;
      slot.second = tri;
    }
  }
  os << "# boundary surface\n";
  for (const auto& p : m.vertices) {
    os << "v " << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
  }
  for (const auto& [key, slot] : faces) {
    if (slot.first != 1) continue;
    os << "f " << slot.second[0] + 1 << ' ' << slot.second[1] + 1 << ' ' << slot.second[2] + 1 << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sweeps.

inline std::vector<std::string> sweep_param_names(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::path_diag: return {"a"};
    case FamilyKind::cube_corner: return {"a", "b", "c"};
    case FamilyKind::eq_pyramid: return {"h"};
    case FamilyKind::equifacial_box: return {"p", "q", "r"};
    case FamilyKind::random_fourball: return {"seed", "index"};
  }
  return {};
}

inline std::string flags_field(const SweepSample& s) {
  std::string out;
  auto add = [&out](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ';';
    out += name;
  };
  add(s.nonobtuse, "nonobtuse");
  add(s.path, "path");
  add(s.equifacial, "equifacial");
  add(s.fourball, "fourball");
  return out.empty() ? "none" : out;
}

/// Header row, then one row per sample: parameters, sigma_radians, sigma_degrees, flags.
inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  for (const auto& name : sweep_param_names(r.family)) os << name << ',';
  os << "sigma_radians,sigma_degrees,flags\n";
  for (const auto& s : r.samples) {
    for (double p : s.params) os << format_double(p) << ',';
    os << format_double(s.sigma) << ',' << format_double(bounds::degrees(s.sigma)) << ',' << flags_field(s) << '\n';
  }
}

}  // namespace tetsum::io
