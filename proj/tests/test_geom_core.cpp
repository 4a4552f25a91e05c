#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "tetsum/geom_core.hpp"

using namespace tetsum;

TEST(Vec3, ArithmeticAndProducts) {
  const Vec3 u{1, 2, 3}, v{4, -5, 6};
  EXPECT_EQ(u + v, (Vec3{5, -3, 9}));
  EXPECT_EQ(u - v, (Vec3{-3, 7, -3}));
  EXPECT_EQ(2.0 * u, (Vec3{2, 4, 6}));
  EXPECT_DOUBLE_EQ(dot(u, v), 12.0);
  EXPECT_EQ(cross(Vec3{1, 0, 0}, Vec3{0, 1, 0}), (Vec3{0, 0, 1}));
  EXPECT_DOUBLE_EQ(triple(Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(distance(Vec3{0, 0, 0}, Vec3{3, 4, 0}), 5.0);
}

TEST(Vec3, RejectsNonFinite) {
  EXPECT_THROW(Vec3(std::numeric_limits<double>::quiet_NaN(), 0, 0), Error);
  EXPECT_THROW(Vec3(0, std::numeric_limits<double>::infinity(), 0), Error);
}

TEST(Vec3, NormalizeZeroThrows) {
  try {
    normalize(Vec3{0, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateInput);
  }
}

TEST(Tolerance, ScaledComparison) {
  const Tolerance tol;
  EXPECT_TRUE(tol.equal(1e6, 1e6 + 1e-4));
  EXPECT_FALSE(tol.equal(1.0, 1.0 + 1e-6));
  EXPECT_TRUE(tol.equal(0.0, 1e-13));
  EXPECT_THROW(Tolerance(-1.0, 1e-12), Error);
}

TEST(AngleBetween, AccurateNearZeroAndPi) {
  EXPECT_NEAR(angle_between(Vec3{1, 0, 0}, Vec3{1, 1e-9, 0}), 1e-9, 1e-20);
  EXPECT_NEAR(angle_between(Vec3{1, 0, 0}, Vec3{-1, 1e-9, 0}), std::numbers::pi - 1e-9, 1e-15);
  EXPECT_NEAR(angle_between(Vec3{1, 0, 0}, Vec3{0, 3, 0}), std::numbers::pi / 2, 1e-15);
}

TEST(PointLineDistance, MidsphereRadiusAgainstXAxis) {
  const Point3 p{2, 2, 1.0 / std::sqrt(56.0)};
  const Line x_axis{{0, 0, 0}, {1, 0, 0}};
  // Oracle: distance to the x-axis is sqrt(y^2 + z^2).
  EXPECT_NEAR(point_line_distance(p, x_axis), std::sqrt(4.0 + 1.0 / 56.0), 1e-15);
  EXPECT_NEAR(point_line_distance(p, x_axis), 15.0 / std::sqrt(56.0), 1e-12);
  EXPECT_EQ(project_onto_line(p, x_axis), (Point3{2, 0, 0}));
}

TEST(Plane, ThroughThreePoints) {
  const auto pl = Plane::through({0, 0, 1}, {1, 0, 1}, {0, 1, 1});
  EXPECT_NEAR(pl.signed_distance({5, 5, 3}), 2.0, 1e-15);
  EXPECT_NEAR(pl.project({5, 5, 3}).z, 1.0, 1e-15);
  EXPECT_THROW(Plane::through({0, 0, 0}, {1, 1, 1}, {2, 2, 2}), Error);
}

TEST(Trilaterate, RecoversExampleSixApex) {
  const double z = 8.0 * std::sqrt(14.0) / 15.0;
  const Point3 a{12, 0, 0}, b{0, 5, 0}, c{0, 0, 0};
  const auto sol = trilaterate(a, b, c, 11, 4, 3);
  ASSERT_TRUE(sol);
  // (B - A) x (C - A) points along +z, so the first solution is the +z apex.
  EXPECT_NEAR(sol->first.x, 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(sol->first.y, 9.0 / 5.0, 1e-12);
  EXPECT_NEAR(sol->first.z, z, 1e-12);
  EXPECT_NEAR(sol->second.z, -z, 1e-12);
}

TEST(Trilaterate, TangentAndDisjointSpheres) {
  const auto touch = trilaterate({0, 0, 0}, {2, 0, 0}, {1, std::sqrt(3.0), 0}, 2.0 / std::sqrt(3.0),
                                 2.0 / std::sqrt(3.0), 2.0 / std::sqrt(3.0));
  ASSERT_TRUE(touch);
  EXPECT_NEAR(distance(touch->first, touch->second), 0.0, 1e-6);
  EXPECT_FALSE(trilaterate({0, 0, 0}, {2, 0, 0}, {1, std::sqrt(3.0), 0}, 0.5, 0.5, 0.5));
}

TEST(Trilaterate, DegenerateCentersThrow) {
  EXPECT_THROW(trilaterate({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, 1, 1, 1), Error);
  EXPECT_THROW(trilaterate({0, 0, 0}, {0, 0, 0}, {0, 1, 0}, 1, 1, 1), Error);
  EXPECT_THROW(trilaterate({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 0, 1, 1), Error);
}

TEST(Solve3, SingularReturnsEmpty) {
  EXPECT_FALSE(solve3({1, 0, 0}, {2, 0, 0}, {0, 0, 1}, {1, 1, 1}, 1e-14));
  const auto x = solve3({2, 0, 0}, {0, 4, 0}, {0, 0, 8}, {2, 4, 8}, 1e-14);
  ASSERT_TRUE(x);
  EXPECT_EQ(*x, (Vec3{1, 1, 1}));
}
