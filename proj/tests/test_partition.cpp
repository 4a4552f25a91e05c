#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "tetsum/bounds.hpp"
#include "tetsum/partition.hpp"

using namespace tetsum;

namespace {

void expect_path_tiling(const Partition& p, std::size_t cells) {
  ASSERT_EQ(p.cells.size(), cells);
  double total = 0.0;
  for (const auto& c : p.cells) {
    EXPECT_TRUE(is_path(c).has_value());
    EXPECT_GT(c.signed_volume(), 0.0);
    total += volume(c);
  }
  EXPECT_NEAR(total, volume(p.parent), 1e-12 * volume(p.parent));
  const auto rep = validate_conformity(p);
  EXPECT_TRUE(rep.is_face_to_face) << rep.violation;
  EXPECT_LT(rep.volume_residual, 1e-12);
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ParseError;
}

}  // namespace

TEST(Fourball24, ExampleTwo) {
  const auto p = partition_fourball_24(realize({5, 5, 4, 3, 3, 4}));
  expect_path_tiling(p, 24);
  const auto rep = validate_conformity(p);
  for (int n : rep.boundary_faces) EXPECT_EQ(n, 6);
  // 4 vertices, 6 tangency points, 4 incenters, 1 center.
  EXPECT_EQ(rep.unique_vertices, 15u);
}

TEST(Fourball24, Regular) {
  expect_path_tiling(partition_fourball_24(Tetra({1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1})), 24);
}

TEST(Fourball24, RandomInteriorCenters) {
  int done = 0;
  for (std::uint64_t i = 0; done < 40 && i < 2000; ++i) {
    const auto t = random_fourball(2024, i).tetra;
    if (midsphere(t).location != CenterLocation::Interior) continue;
    expect_path_tiling(partition_fourball_24(t), 24);
    ++done;
  }
  EXPECT_EQ(done, 40);
}

TEST(Fourball24, Preconditions) {
  const double z = 8.0 * std::sqrt(14.0) / 15.0;
  const Tetra ex6({0, 0, 0}, {12, 0, 0}, {0, 5, 0}, {4.0 / 3.0, 9.0 / 5.0, z});
  EXPECT_EQ(code_of([&] { partition_fourball_24(ex6); }), Errc::CenterNotInterior);
  EXPECT_EQ(code_of([] { partition_fourball_24(eq_pyramid(0.05)); }), Errc::CenterNotInterior);
  EXPECT_EQ(code_of([] { partition_fourball_24(Tetra({0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {1, 2, 3})); }),
            Errc::NotFourBall);
}

TEST(Red8, PathLegsOneTwoThree) {
  const Tetra t({0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {1, 2, 3});
  const auto p = red_refine_path(t, *is_path(t));
  expect_path_tiling(p, 8);
  for (const auto& c : p.cells) EXPECT_NEAR(volume(c), volume(t) / 8.0, 1e-12 * volume(t));
  EXPECT_EQ(validate_conformity(p).unique_vertices, 10u);
}

TEST(Red8, RandomPathTetrahedra) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int n = 0; n < 200; ++n) {
    const auto t = path_tetra(u(rng), u(rng), u(rng));
    const auto p = red_refine_path(t, *is_path(t));
    expect_path_tiling(p, 8);
    for (const auto& c : p.cells) EXPECT_NEAR(volume(c), volume(t) / 8.0, 1e-12 * volume(t));
  }
}

TEST(Red8, RejectsNonPath) {
  const Tetra corner({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1});
  EXPECT_EQ(code_of([&] { red_refine_path(corner, {0, 1, 2, 3}); }), Errc::NotPath);
}

TEST(Red8, RefinesWholeFourballPartition) {
  const auto p = partition_fourball_24(realize({5, 5, 4, 3, 3, 4}));
  const auto fine = red_refine_all(p);
  expect_path_tiling(fine, 192);
}

TEST(Conformity, PerturbedCellIsRejected) {
  auto p = partition_fourball_24(realize({5, 5, 4, 3, 3, 4}));
  const Tetra& c = p.cells[5];
  p.cells[5] = Tetra(c[0], c[1], c[2], c[3] + Vec3{1e-3, -2e-3, 1e-3});
  EXPECT_FALSE(validate_conformity(p).is_face_to_face);
}

TEST(Conformity, MissingCellIsRejected) {
  const Tetra t({0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {1, 2, 3});
  auto p = red_refine_path(t, *is_path(t));
  p.cells.pop_back();
  const auto rep = validate_conformity(p);
  EXPECT_FALSE(rep.is_face_to_face);
  EXPECT_GT(rep.volume_residual, 0.1);
}

TEST(Conformity, HangingVertexIsRejected) {
  // Split the corner cell at O along the midpoint of its interior edge; the octahedron cell is left intact.
  const Tetra t({0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {1, 2, 3});
  auto p = red_refine_path(t, *is_path(t));
  const Tetra c = p.cells[0];
  const Point3 m = (c[2] + c[3]) * 0.5;
  p.cells[0] = oriented_cell(c[0], c[1], c[2], m);
  p.cells.push_back(oriented_cell(c[0], c[1], m, c[3]));
  EXPECT_FALSE(validate_conformity(p).is_face_to_face);
}
