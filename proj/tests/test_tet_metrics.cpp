#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tetsum/tet_metrics.hpp"

using namespace tetsum;

namespace {

constexpr double kPi = std::numbers::pi;
double deg(double r) { return r * 180.0 / kPi; }

Tetra from_oracle(const std::array<oracle::P, 4>& v) {
  return Tetra({v[0][0], v[0][1], v[0][2]}, {v[1][0], v[1][1], v[1][2]}, {v[2][0], v[2][1], v[2][2]},
               {v[3][0], v[3][1], v[3][2]});
}

double oracle_d3(const EdgeSextuple& s) {
  // (P1P2, P2P3, P1P3, P3P4, P1P4, P2P4)
  return oracle::cayley_menger(s.a, s.b, s.c, s.d, s.e, s.f);
}

const double kZ6 = 8.0 * std::sqrt(14.0) / 15.0;

Tetra example6() { return Tetra({0, 0, 0}, {12, 0, 0}, {0, 5, 0}, {4.0 / 3.0, 9.0 / 5.0, kZ6}); }

}  // namespace

TEST(EdgeSextuple, RejectsNonPositive) {
  EXPECT_THROW(EdgeSextuple(1, 1, 1, 1, 1, 0), Error);
  EXPECT_THROW(EdgeSextuple(1, 1, -1, 1, 1, 1), Error);
}

TEST(EdgeLabels, OppositePairs) {
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kEdgeVertices[static_cast<std::size_t>(k)];
    const auto [p, q] = kEdgeVertices[static_cast<std::size_t>(opposite_edge(k))];
    EXPECT_NE(i, p);
    EXPECT_NE(i, q);
    EXPECT_NE(j, p);
    EXPECT_NE(j, q);
    EXPECT_EQ(edge_index(j, i), k);
  }
}

TEST(CayleyMenger, GoldenValues) {
  EXPECT_NEAR(cayley_menger_d3({1, 1, 1, 1, 1, 1}), 4.0, 4e-9);
  EXPECT_NEAR(cayley_menger_d3({5, 5, 4, 3, 3, 4}), 10240.0, 10240e-9);
  EXPECT_NEAR(cayley_menger_d3({2, 11, 11, 20, 11, 11}), 256000.0, 256000e-9);
  EXPECT_NEAR(cayley_menger_d3({12, 12, 20, 11, 11, 3}), 448000.0, 448000e-9);
  EXPECT_NEAR(cayley_menger_d3({1, 1, 1, 1, 1, 1.75}), -0.3828, 1e-3);
  EXPECT_NEAR(cayley_menger_d3({1, 3, 1, 5, 3, 1}), 468.0, 468e-9);
  EXPECT_NEAR(cayley_menger_d3({1.1, 2, 1.1, 2, 1.1, 2}), -11.84, 1e-2);
  const double r2 = std::sqrt(2.0);
  EXPECT_NEAR(cayley_menger_d3({1, r2, 1, r2, 1, r2}), 8.0, 8e-9);
}

TEST(CayleyMenger, AgreesWithCofactorOracleAndBlumenthal) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 300; ++n) {
    const auto v = oracle::random_tetra(rng);
    const Tetra t = from_oracle(v);
    const auto s = edge_sextuple(t);
    const double ref = oracle_d3(s);
    EXPECT_NEAR(cayley_menger_d3(s), ref, 1e-9 * std::fabs(ref) + 1e-12);
    EXPECT_NEAR(cayley_menger_blumenthal(s), ref, 1e-9 * std::fabs(ref) + 1e-12);
    EXPECT_NEAR(288.0 * volume(t) * volume(t), ref, 1e-9 * std::fabs(ref) + 1e-12);
  }
}

TEST(TetraExists, ClassifiesFailures) {
  EXPECT_TRUE(tetra_exists({5, 5, 4, 3, 3, 4}).ok());
  const auto ex4 = tetra_exists({1, 1, 1, 1, 1, 1.75});
  EXPECT_EQ(ex4.status, Existence::NoEmbedding);
  EXPECT_NEAR(ex4.d3, -0.3828125, 1e-12);
  // Positive D3 yet a face violates the triangle inequality.
  const auto nt = tetra_exists({1, 3, 1, 5, 3, 1});
  EXPECT_EQ(nt.status, Existence::NoTriangle);
  EXPECT_GT(nt.d3, 0.0);
  EXPECT_EQ(tetra_exists({1.1, 2, 1.1, 2, 1.1, 2}).status, Existence::NoEmbedding);
}

TEST(Realize, ReproducesEdges) {
  const EdgeSextuple s{12, 13, 5, 4, 3, 11};
  const Tetra t = realize(s);
  const auto back = edge_sextuple(t);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(back[k], s[k], 1e-12);
  EXPECT_NEAR(volume(t), 10.0 * kZ6, 1e-9);
  EXPECT_GT(t[3].z, 0.0);
  try {
    realize({1, 1, 1, 1, 1, 1.75});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotRealizable);
  }
}

TEST(Example6, SextupleAndVolume) {
  const auto s = edge_sextuple(example6());
  EXPECT_EQ(s, (EdgeSextuple{12, 13, 5, 4, 3, 11}));
  EXPECT_NEAR(volume(example6()), 10.0 * kZ6, 1e-12);
  EXPECT_NEAR(cayley_menger_d3(s), 114688.0, 114688e-9);
}

TEST(Dihedral, ExampleTwo) {
  const auto rep = dihedral_angles(realize({5, 5, 4, 3, 3, 4}));
  EXPECT_NEAR(deg(rep.at(Edge::a)), 54.41, 0.01);
  EXPECT_NEAR(deg(rep.at(Edge::b)), 54.41, 0.01);
  EXPECT_NEAR(deg(rep.at(Edge::c)), 60.79, 0.01);
  EXPECT_NEAR(deg(rep.at(Edge::d)), 90.00, 0.01);
  EXPECT_NEAR(deg(rep.at(Edge::e)), 90.00, 0.01);
  EXPECT_NEAR(deg(rep.at(Edge::f)), 83.62, 0.01);
  for (double s : rep.opposite_sums()) EXPECT_NEAR(deg(s), 144.41, 0.01);
  EXPECT_TRUE(rep.nonobtuse);
  EXPECT_TRUE(rep.fourball);
}

TEST(Dihedral, RegularAndExampleSix) {
  const auto reg = dihedral_angles(realize({1, 1, 1, 1, 1, 1}));
  for (double d : reg.dihedral) EXPECT_NEAR(d, std::acos(1.0 / 3.0), 1e-12);
  EXPECT_TRUE(reg.equifacial);
  EXPECT_FALSE(reg.path);
  EXPECT_NEAR(deg(dihedral_angles(example6()).sigma), 453.33, 0.01);
}

TEST(Dihedral, AgreesWithVertexFigureOracle) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 300; ++n) {
    const auto v = oracle::random_tetra(rng, 0.02);
    const auto rep = dihedral_angles(from_oracle(v));
    for (int k = 0; k < 6; ++k) {
      const auto [i, j] = kEdgeVertices[static_cast<std::size_t>(k)];
      EXPECT_NEAR(rep.dihedral[static_cast<std::size_t>(k)], oracle::dihedral(v, i, j), 1e-7);
    }
  }
}

TEST(Dihedral, FlatTetraRejected) {
  EXPECT_THROW(Tetra({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}), Error);
}

TEST(Classification, PathAndCubeCorner) {
  const Tetra path({0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {1, 2, 3});
  const auto order = is_path(path);
  ASSERT_TRUE(order);
  EXPECT_TRUE(is_path_ordering(path, *order));
  const auto rep = dihedral_angles(path);
  EXPECT_TRUE(rep.path);
  EXPECT_TRUE(rep.nonobtuse);
  const Tetra corner({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1});
  EXPECT_FALSE(is_path(corner));
  EXPECT_FALSE(is_path(example6()));
  EXPECT_FALSE(is_equifacial(example6()));
  EXPECT_TRUE(is_equifacial(Tetra({0, 0, 0}, {1, 2, 0}, {1, 0, 3}, {0, 2, 3})));
}

TEST(Spheres, ExampleSixCircumcenter) {
  const auto cs = circumsphere(example6());
  EXPECT_NEAR(cs.center.x, 6.0, 1e-9);
  EXPECT_NEAR(cs.center.y, 2.5, 1e-9);
  EXPECT_NEAR(cs.center.z, -15.0 / std::sqrt(14.0), 1e-9);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(distance(cs.center, example6()[i]), cs.radius, 1e-9);
}

TEST(Spheres, InsphereTouchesFaces) {
  const Tetra t = example6();
  const auto ins = insphere(t);
  for (int k = 0; k < 4; ++k) {
    const auto f = face_vertices(k);
    const auto pl = Plane::through(t[f[0]], t[f[1]], t[f[2]]);
    EXPECT_NEAR(std::fabs(pl.signed_distance(ins.center)), ins.radius, 1e-12);
  }
  const auto reg = Tetra({1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1});
  EXPECT_NEAR(insphere(reg).radius * 3.0, circumsphere(reg).radius, 1e-12);
}

TEST(Barycentric, SumsToOneAndLocates) {
  const Tetra t = example6();
  const auto bc = barycentric(t, (t[0] + t[1] + t[2] + t[3]) * 0.25);
  for (double w : bc) EXPECT_NEAR(w, 0.25, 1e-12);
  const auto out = barycentric(t, Point3{2, 2, -1});
  EXPECT_LT(out[3], 0.0);
}
