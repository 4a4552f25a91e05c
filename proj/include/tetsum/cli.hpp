#pragma once

#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tetsum/bounds.hpp"
#include "tetsum/fourball.hpp"
#include "tetsum/io.hpp"
#include "tetsum/partition.hpp"
#include "tetsum/tet_metrics.hpp"

namespace tetsum::cli {

enum ExitCode : int { kOk = 0, kParse = 2, kGeometry = 3, kNumeric = 4 };

inline int exit_code(Errc code) {
  switch (code) {
    case Errc::ParseError: return kParse;
    case Errc::NotConstructible:
    case Errc::NoSolution: return kNumeric;
    default: return kGeometry;
  }
}

struct Globals {
  double tol_rel = 1e-9;
  double tol_abs = 1e-12;
  bool radians = false;
  std::uint64_t seed = 42;
  bool json = false;

  Tolerance tolerance() const { return Tolerance(tol_rel, tol_abs); }

  std::string angle(double rad) const {
    return radians ? io::fixed(rad, 6) : io::fixed(bounds::degrees(rad), 2);
  }
  double angle_value(double rad) const { return radians ? rad : bounds::degrees(rad); }
  const char* unit() const { return radians ? "rad" : "deg"; }
};

inline std::string read_input(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(Errc::ParseError, "cannot write '" + path + "'");
  f << text;
}

inline std::string fmt_point(const Point3& p, int digits = 9) {
  return "(" + io::fixed(p.x, digits) + ", " + io::fixed(p.y, digits) + ", " + io::fixed(p.z, digits) + ")";
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

// ---------------------------------------------------------------------------

inline int cmd_analyze(const std::string& input, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto doc = io::parse_tetra_document(read_input(input));
  const Tolerance tol = doc.tolerance(g.tolerance());
  if (doc.edges) {
    const auto ex = tetra_exists(*doc.edges, tol);
    if (!ex.ok()) {
      err << "NotRealizable: " << to_string(ex.status);
      if (ex.status == Existence::NoTriangle) err << " (face " << ex.face << ")";
      err << ", D3 = " << io::fixed(ex.d3, 4) << '\n';
      return kGeometry;
    }
  }
  const Tetra t = doc.tetra(tol);
  const auto s = edge_sextuple(t);
  const auto rep = dihedral_angles(t, tol);
  const double vol = volume(t);
  const double d3 = cayley_menger_d3(s);
  const double d3b = cayley_menger_blumenthal(s);
  const auto ins = insphere(t, tol);
  const auto circ = circumsphere(t, tol);

  std::optional<TangentLengths4> tl;
  std::optional<MidSphere> ms;
  if (rep.fourball) {
    tl = fourball_tangents(t, tol);
    ms = midsphere(t, tol);
  }

  if (g.json) {
    io::json j;
    if (!doc.label.empty()) j["label"] = doc.label;
    j["edges"] = s.as_array();
    j["volume"] = vol;
    j["d3"] = {{"cayley_menger", d3}, {"blumenthal", d3b}};
    j["angle_unit"] = g.unit();
    std::vector<double> dih;
    for (double a : rep.dihedral) dih.push_back(g.angle_value(a));
    j["dihedral"] = dih;
    j["sigma"] = g.angle_value(rep.sigma);
    j["classification"] = {{"nonobtuse", rep.nonobtuse},
                           {"path", rep.path},
                           {"equifacial", rep.equifacial},
                           {"fourball", rep.fourball}};
    j["inradius"] = ins.radius;
    j["circumradius"] = circ.radius;
    j["circumcenter"] = {circ.center.x, circ.center.y, circ.center.z};
    if (tl) {
      j["tangent_lengths"] = tl->l;
      j["midsphere"] = {{"radius", ms->radius},
                        {"center", {ms->center.x, ms->center.y, ms->center.z}},
                        {"location", std::string(to_string(ms->location))}};
      j["laszlo_chain"] = {circ.radius, std::sqrt(3.0) * ms->radius, 3.0 * ins.radius};
    }
    out << j.dump(2) << '\n';
    return kOk;
  }

  if (!doc.label.empty()) out << "label: " << doc.label << '\n';
  out << "edges (a b c d e f):";
  for (double e : s.as_array()) out << ' ' << io::fixed(e, 6);
  out << '\n';
  out << "volume: " << io::fixed(vol, 9) << '\n';
  out << "D3 (Cayley-Menger): " << io::fixed(d3, 6) << '\n';
  out << "D3 (Blumenthal): " << io::fixed(d3b, 6) << '\n';
  out << "dihedral angles (" << g.unit() << "):";
  for (std::size_t k = 0; k < 6; ++k) out << ' ' << kEdgeNames[k] << '=' << g.angle(rep.dihedral[k]);
  out << '\n';
  out << "sigma: " << g.angle(rep.sigma) << ' ' << g.unit() << '\n';
  out << "nonobtuse: " << yes_no(rep.nonobtuse) << '\n';
  out << "path: " << yes_no(rep.path) << '\n';
  out << "equifacial: " << yes_no(rep.equifacial) << '\n';
  out << "fourball: " << yes_no(rep.fourball) << '\n';
  out << "inradius r: " << io::fixed(ins.radius, 9) << '\n';
  out << "circumradius R: " << io::fixed(circ.radius, 9) << '\n';
  out << "circumcenter: " << fmt_point(circ.center) << '\n';
  if (tl) {
    out << "tangent lengths:";
    for (double l : tl->l) out << ' ' << io::fixed(l, 6);
    out << '\n';
    out << "midsphere radius: " << io::fixed(ms->radius, 9) << '\n';
    out << "midsphere center: " << fmt_point(ms->center) << " (" << to_string(ms->location) << ")\n";
    out << "R >= sqrt(3) rho >= 3r: " << io::fixed(circ.radius, 9) << " >= " << io::fixed(std::sqrt(3.0) * ms->radius, 9)
        << " >= " << io::fixed(3.0 * ins.radius, 9) << '\n';
  }
  return kOk;
}

inline void print_checks(const Tetra& t, const Tolerance& tol, std::ostream& out) {
  const auto rep = fourball_checks(t, tol);
  for (std::size_t i = 0; i < rep.conditions.size(); ++i) {
    out << "check " << i + 1 << ": " << (rep.conditions[i].pass ? "PASS" : "FAIL") << " (residual "
        << io::format_double(rep.conditions[i].residual) << ")\n";
  }
  out << "checks consistent: " << yes_no(rep.consistent()) << '\n';
}

struct BuildOptions {
  std::vector<double> triangle;
  double l4 = 0.0;
  bool mirror = false;
  std::vector<double> u2, u3, u4;
  std::vector<double> initial{1.0, 1.0, 1.0};
  bool check = false;
  std::string out;
  std::string label;
};

inline int cmd_build_face(const BuildOptions& o, const Globals& g, std::ostream& out) {
  const Tolerance tol = g.tolerance();
  const Point3 a1{o.triangle[0], o.triangle[1], o.triangle[2]};
  const Point3 a2{o.triangle[3], o.triangle[4], o.triangle[5]};
  const Point3 a3{o.triangle[6], o.triangle[7], o.triangle[8]};
  const Tetra t = fourball_from_face(a1, a2, a3, o.l4, o.mirror, tol);
  write_output(o.out, io::emit(io::TetraDocument::from_tetra(t, o.label)), out);
  if (o.check) print_checks(t, tol, out);
  return kOk;
}

inline int cmd_build_cone(const BuildOptions& o, const Globals& g, std::ostream& out) {
  const Tolerance tol = g.tolerance();
  auto vec = [](const std::vector<double>& v) { return Vec3{v[0], v[1], v[2]}; };
  const auto b = fourball_from_cone(vec(o.u2), vec(o.u3), vec(o.u4), {o.initial[0], o.initial[1], o.initial[2]}, tol);
  write_output(o.out, io::emit(io::TetraDocument::from_tetra(b.tetra, o.label)), out);
  if (g.json) return kOk;
  if (o.out.empty() || o.out == "-") out << "# ";
  out << "tangent lengths (apex first): 1 " << io::format_double(b.l[0]) << ' ' << io::format_double(b.l[1]) << ' '
      << io::format_double(b.l[2]) << " (" << b.iterations << " iterations)\n";
  if (o.check) print_checks(b.tetra, tol, out);
  return kOk;
}

struct PartitionOptions {
  std::string input;
  std::string kind = "fourball24";
  std::string out;
  std::string obj;
  std::string mesh_json;
};

inline int cmd_partition(const PartitionOptions& o, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto doc = io::parse_tetra_document(read_input(o.input));
  const Tolerance tol = doc.tolerance(g.tolerance());
  const Tetra t = doc.tetra(tol);
  Partition p = [&] {
    if (o.kind == "fourball24") return partition_fourball_24(t, tol);
    const auto order = is_path(t, tol);
    if (!order) throw Error(Errc::NotPath, "no vertex ordering makes three mutually orthogonal edges");
    return red_refine_path(t, *order, tol);
  }();
  const auto conf = validate_conformity(p, tol);
  const auto mesh = io::make_mesh(p, tol, doc.label);
  if (!o.out.empty()) {
    std::ostringstream off;
    io::write_off(off, mesh);
    write_output(o.out, off.str(), out);
  }
  if (!o.obj.empty()) {
    std::ostringstream obj;
    io::write_obj_surface(obj, mesh);
    write_output(o.obj, obj.str(), out);
  }
  if (!o.mesh_json.empty()) write_output(o.mesh_json, io::emit(mesh), out);

  std::size_t path_cells = 0;
  std::vector<bool> is_path_cell;
  for (const auto& c : p.cells) {
    is_path_cell.push_back(is_path(c, tol).has_value());
    path_cells += is_path_cell.back() ? 1 : 0;
  }
  // Keep stdout clean when the mesh itself goes there.
  std::ostream& info = (o.out == "-" || o.obj == "-" || o.mesh_json == "-") ? err : out;
  if (g.json) {
    io::json j;
    j["kind"] = std::string(to_string(p.kind));
    j["cells"] = p.cells.size();
    j["vertices"] = conf.unique_vertices;
    j["path_cells"] = path_cells;
    j["face_to_face"] = conf.is_face_to_face;
    j["volume_residual"] = conf.volume_residual;
    j["boundary_faces"] = conf.boundary_faces;
    if (!conf.violation.empty()) j["violation"] = conf.violation;
    info << j.dump(2) << '\n';
  } else {
    info << "kind: " << to_string(p.kind) << '\n';
    info << "cells: " << p.cells.size() << ", vertices: " << conf.unique_vertices << '\n';
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
      info << "cell " << i << ": volume " << io::format_double(volume(p.cells[i])) << ", path "
           << yes_no(is_path_cell[i]) << '\n';
    }
    info << "path cells: " << path_cells << "/" << p.cells.size() << '\n';
    info << "face-to-face: " << yes_no(conf.is_face_to_face);
    if (!conf.violation.empty()) info << " (" << conf.violation << ")";
    info << '\n';
    info << "volume residual: " << io::format_double(conf.volume_residual) << '\n';
  }
  return conf.is_face_to_face && path_cells == p.cells.size() ? kOk : kGeometry;
}

struct SweepOptions {
  std::string family;
  std::size_t n = 0;
  std::string out;
  unsigned threads = 0;
};

inline std::size_t default_points(FamilyKind k) {
  switch (k) {
    case FamilyKind::path_diag: return 200;
    case FamilyKind::cube_corner:
    case FamilyKind::equifacial_box: return 20;
    case FamilyKind::eq_pyramid: return 500;
    case FamilyKind::random_fourball: return 10000;
  }
  return 100;
}

inline int cmd_sweep(const SweepOptions& o, const Globals& g, std::ostream& out) {
  const auto kind = parse_family(o.family);
  if (!kind) throw Error(Errc::ParseError, "unknown family '" + o.family + "'");
  const std::size_t n = o.n ? o.n : default_points(*kind);
  const auto r = sweep(*kind, default_grid(*kind, n, g.seed), o.threads, g.tolerance());
  if (!o.out.empty()) {
    std::ostringstream csv;
    io::write_sweep_csv(csv, r);
    write_output(o.out, csv.str(), out);
  }
  std::ostream& info = o.out == "-" ? std::cerr : out;
  if (g.json) {
    io::json j;
    j["family"] = std::string(family_info(*kind).name);
    j["samples"] = r.samples.size();
    j["min_sigma"] = g.angle_value(r.min_sigma);
    j["max_sigma"] = g.angle_value(r.max_sigma);
    j["argmin"] = r.samples[r.argmin].params;
    j["argmax"] = r.samples[r.argmax].params;
    for (const auto& v : r.verdicts) j["verdicts"].push_back({{"claim", v.claim}, {"pass", v.pass}, {"detail", v.detail}});
    info << j.dump(2) << '\n';
  } else {
    info << "family: " << family_info(*kind).name << ", samples: " << r.samples.size() << '\n';
    info << "sigma range: [" << g.angle(r.min_sigma) << ", " << g.angle(r.max_sigma) << "] " << g.unit() << '\n';
    for (const auto& v : r.verdicts) {
      info << (v.pass ? "PASS " : "FAIL ") << v.claim;
      if (!v.detail.empty()) info << " [" << v.detail << "]";
      info << '\n';
    }
    info << "reference: 2pi = " << g.angle(bounds::kTwoPi) << ", 2.5pi = " << g.angle(bounds::kPathUpper)
         << ", cube corner = " << g.angle(bounds::kCubeCornerLower) << ", kmax bound = "
         << g.angle(6.0 * bounds::kPi - 3.0 * bounds::kKmax) << ", regular = " << g.angle(bounds::kRegularSigma)
         << ", 3pi = " << g.angle(bounds::kThreePi) << " (" << g.unit() << ")\n";
  }
  return r.all_pass() ? kOk : kGeometry;
}

inline int cmd_certify_kmax(int resolution, unsigned threads, const Globals& g, std::ostream& out) {
  const auto c = certify_kmax(resolution, threads, g.tolerance());
  const double gap = std::fabs(c.k_max - bounds::kKmax);
  const bool iso_ok = c.iso_agreement <= 1e-8 && std::fabs(c.iso_k_max - c.k_max) <= 1e-6;
  if (g.json) {
    io::json j;
    j["resolution"] = resolution;
    j["admissible"] = c.admissible;
    j["solved"] = c.solved;
    j["argmax"] = c.argmax;
    j["k_max"] = c.k_max;
    j["reference"] = bounds::kKmax;
    j["gap"] = gap;
    j["sigma_lower"] = g.angle_value(c.implied_sigma_lower());
    j["isosceles"] = {{"argmax", c.iso_argmax}, {"k_max", c.iso_k_max}, {"agreement", c.iso_agreement},
                      {"checked", c.iso_checked}, {"pass", iso_ok}};
    out << j.dump(2) << '\n';
  } else {
    out << "grid " << resolution << "^3: " << c.admissible << " admissible triples, " << c.solved << " solved\n";
    out << "argmax: (" << io::fixed(c.argmax[0], 9) << ", " << io::fixed(c.argmax[1], 9) << ", "
        << io::fixed(c.argmax[2], 9) << ")\n";
    out << "k_max: " << io::fixed(c.k_max, 9) << '\n';
    out << "|k_max - 2 arccos(-1/3)|: " << io::format_double(gap) << '\n';
    out << "implied sigma lower bound: " << g.angle(c.implied_sigma_lower()) << ' ' << g.unit() << '\n';
    out << "isosceles cross-check: " << (iso_ok ? "PASS" : "FAIL") << " (k_max " << io::fixed(c.iso_k_max, 9)
        << ", max disagreement " << io::format_double(c.iso_agreement) << " over " << c.iso_checked << " points)\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

/// Parses argv and runs one subcommand; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Dihedral angle sums of tetrahedra: analysis, 4-ball builders, partitions, bound sweeps"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--tol-rel", g.tol_rel, "Relative tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-abs", g.tol_abs, "Absolute tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--radians", g.radians, "Print angles in radians");
  app.add_option("--seed", g.seed, "Seed for random families");
  app.add_flag("--json", g.json, "Emit JSON");

  std::string analyze_input;
  auto* analyze = app.add_subcommand("analyze", "Angles, volumes and classifications of a tetrahedron document");
  analyze->add_option("input", analyze_input, "JSON document path, or - for stdin")->required();

  BuildOptions bo;
  auto* build = app.add_subcommand("build", "Construct a 4-ball tetrahedron");
  build->require_subcommand(1);
  auto* from_face = build->add_subcommand("from-face", "Apex over a base triangle for a given l4");
  from_face->add_option("--triangle", bo.triangle, "Nine coordinates of A1 A2 A3")->expected(9)->required();
  from_face->add_option("--l4", bo.l4, "Apex tangent length")->required();
  from_face->add_flag("--mirror", bo.mirror, "Take the apex on the other side of the base");
  auto* from_cone = build->add_subcommand("from-cone", "Tetrahedron with a vertex cone spanned by three directions");
  from_cone->add_option("--u2", bo.u2)->expected(3)->required();
  from_cone->add_option("--u3", bo.u3)->expected(3)->required();
  from_cone->add_option("--u4", bo.u4)->expected(3)->required();
  from_cone->add_option("--initial", bo.initial, "Starting guess for the three apex distances")->expected(3);
  for (auto* sub : {from_face, from_cone}) {
    sub->add_flag("--check", bo.check, "Re-run the five 4-ball checks");
    sub->add_option("--out", bo.out, "Write the document here instead of stdout");
    sub->add_option("--label", bo.label, "Label stored in the document");
  }

  PartitionOptions po;
  auto* part = app.add_subcommand("partition", "Partition into path tetrahedra and export a mesh");
  part->add_option("input", po.input, "JSON document path, or - for stdin")->required();
  part->add_option("--kind", po.kind)->check(CLI::IsMember({"fourball24", "red8"}));
  part->add_option("--out", po.out, "OFF mesh output");
  part->add_option("--obj", po.obj, "OBJ boundary surface output");
  part->add_option("--mesh-json", po.mesh_json, "Mesh document output");

  SweepOptions so;
  auto* sw = app.add_subcommand("sweep", "Sample a family and check its sigma bounds");
  std::vector<std::string> family_names;
  for (const auto& f : kFamilies) family_names.emplace_back(f.name);
  sw->add_option("--family", so.family)->required()->check(CLI::IsMember(family_names));
  sw->add_option("--n", so.n, "Points per axis (sample count for random_fourball)");
  sw->add_option("--out", so.out, "CSV output");
  sw->add_option("--threads", so.threads, "Worker threads, 0 for all cores");

  int resolution = 40;
  unsigned kthreads = 0;
  auto* km = app.add_subcommand("certify-kmax", "Maximize k over spherical normal triangles");
  km->add_option("--resolution", resolution)->check(CLI::Range(20, 1000));
  km->add_option("--threads", kthreads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_input, g, out, err);
    if (*from_face) return cmd_build_face(bo, g, out);
    if (*from_cone) return cmd_build_cone(bo, g, out);
    if (*part) return cmd_partition(po, g, out, err);
    if (*sw) return cmd_sweep(so, g, out);
    if (*km) return cmd_certify_kmax(resolution, kthreads, g, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code(e.code());
  }
  return kParse;
}

}  // namespace tetsum::cli
