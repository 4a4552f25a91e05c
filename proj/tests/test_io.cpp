#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "tetsum/io.hpp"

using namespace tetsum;
using namespace tetsum::io;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::DegenerateInput;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(TetraDocument, VerticesRoundTrip) {
  TetraDocument doc;
  doc.vertices = std::array<Point3, 4>{Point3{0, 0, 0}, Point3{0.1, 1.0 / 3.0, 0}, Point3{0, 5, 1e-17},
                                       Point3{4.0 / 3.0, 9.0 / 5.0, 8.0 * std::sqrt(14.0) / 15.0}};
  doc.label = "round trip";
  doc.tol_rel = 1e-8;
  EXPECT_EQ(parse_tetra_document(emit(doc)), doc);
}

TEST(TetraDocument, EdgesRoundTripAndRealize) {
  TetraDocument doc;
  doc.edges = EdgeSextuple{12, 13, 5, 4, 3, 11};
  const auto back = parse_tetra_document(emit(doc));
  EXPECT_EQ(back, doc);
  EXPECT_NEAR(volume(back.tetra({})), 10.0 * 8.0 * std::sqrt(14.0) / 15.0, 1e-9);
}

TEST(TetraDocument, ToleranceOverrides) {
  const auto doc = parse_tetra_document(R"({"edges": {"a":1,"b":1,"c":1,"d":1,"e":1,"f":1},
                                            "tolerance": {"rel": 1e-6}})");
  const auto tol = doc.tolerance(Tolerance(1e-9, 1e-13));
  EXPECT_EQ(tol.rel, 1e-6);
  EXPECT_EQ(tol.abs, 1e-13);
}

TEST(TetraDocument, ParseErrorsNameTheField) {
  EXPECT_EQ(code_of([] { parse_tetra_document("{"); }), Errc::ParseError);
  EXPECT_NE(message_of([] { parse_tetra_document("{\n  \"label\": x\n}"); }).find("line 2"), std::string::npos);
  EXPECT_NE(message_of([] { parse_tetra_document(R"({"vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,"z"]]})"); })
                .find("vertices[3][2]"),
            std::string::npos);
  EXPECT_NE(message_of([] { parse_tetra_document(R"({"edges": {"a":1,"b":1,"c":1,"d":1,"e":1}})"); })
                .find("edges.f"),
            std::string::npos);
  EXPECT_NE(message_of([] {
              parse_tetra_document(R"({"vertices": [[0,0,0],[1,0,0],[0,1,0],[0,0,1]],
                                       "edges": {"a":1,"b":1,"c":1,"d":1,"e":1,"f":1}})");
            }).find("exactly one"),
            std::string::npos);
  EXPECT_EQ(code_of([] { parse_tetra_document(R"({"vertices": [], "colour": 1})"); }), Errc::ParseError);
  EXPECT_EQ(code_of([] { parse_tetra_document(R"({"edges": {"a":-1,"b":1,"c":1,"d":1,"e":1,"f":1}})"); }),
            Errc::ParseError);
}

TEST(TetraDocument, NonRealizableEdges) {
  const auto doc = parse_tetra_document(R"({"edges": {"a":1,"b":1,"c":1,"d":1,"e":1,"f":1.75}})");
  EXPECT_EQ(code_of([&] { doc.tetra({}); }), Errc::NotRealizable);
}

TEST(MeshDocument, JsonRoundTripAndDeterministicOrder) {
  const auto p = partition_fourball_24(realize({5, 5, 4, 3, 3, 4}));
  const auto m = make_mesh(p, {}, "example2", 7);
  EXPECT_EQ(m.vertices.size(), 15u);
  EXPECT_EQ(m.cells.size(), 24u);
  EXPECT_EQ(m.provenance.kind, "fourball24");
  EXPECT_EQ(parse_mesh_document(emit(m)), m);

  auto shuffled = p;
  std::reverse(shuffled.cells.begin(), shuffled.cells.end());
  EXPECT_EQ(emit(make_mesh(shuffled, {}, "example2", 7)), emit(m));
}

TEST(MeshDocument, RejectsBadIndices) {
  EXPECT_EQ(code_of([] { parse_mesh_document(R"({"vertices": [[0,0,0]], "cells": [[0,0,0,1]]})"); }),
            Errc::ParseError);
}

TEST(Off, RoundTripPreservesVolumes) {
  const Tetra t({0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {1, 2, 3});
  const auto m = make_mesh(red_refine_path(t, *is_path(t)));
  std::stringstream ss;
  write_off(ss, m);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("OFF\n10 8 0\n", 0), 0u);
  const auto back = read_off(ss);
  ASSERT_EQ(back.cells, m.cells);
  const auto a = m.tetras(), b = back.tetras();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(volume(b[i]), volume(a[i]), 1e-12 * volume(a[i]));
}

TEST(Off, FourBallPartitionVolumesBitExact) {
  const auto m = make_mesh(partition_fourball_24(realize({5, 5, 4, 3, 3, 4})));
  std::stringstream ss;
  write_off(ss, m);
  const auto back = read_off(ss);
  EXPECT_EQ(back.vertices, m.vertices);
}

TEST(Off, MalformedInput) {
  std::istringstream missing("OFF\n2 1 0\n0 0 0\n");
  EXPECT_NE(message_of([&] { read_off(missing); }).find("end of file"), std::string::npos);
  std::istringstream tri("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  EXPECT_NE(message_of([&] { read_off(tri); }).find("line 6"), std::string::npos);
  std::istringstream header("PLY\n");
  EXPECT_EQ(code_of([&] { read_off(header); }), Errc::ParseError);
}

TEST(Obj, BoundarySurfaceOfPartition) {
  const auto m = make_mesh(partition_fourball_24(realize({5, 5, 4, 3, 3, 4})));
  std::ostringstream os;
  write_obj_surface(os, m);
  const std::string text = os.str();
  std::size_t faces = 0, verts = 0;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    faces += line.rfind("f ", 0) == 0;
    verts += line.rfind("v ", 0) == 0;
  }
  EXPECT_EQ(faces, 24u);
  EXPECT_EQ(verts, 15u);
}

TEST(Csv, SweepColumns) {
  const auto r = sweep(FamilyKind::cube_corner, default_grid(FamilyKind::cube_corner, 2));
  std::ostringstream os;
  write_sweep_csv(os, r);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  EXPECT_EQ(header, "a,b,c,sigma_radians,sigma_degrees,flags");
  std::size_t rows = 0;
  while (std::getline(is, row)) {
    ++rows;
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 5);
    EXPECT_NE(row.find("nonobtuse"), std::string::npos);
  }
  EXPECT_EQ(rows, 8u);
  EXPECT_EQ(os.str().back(), '\n');
}
