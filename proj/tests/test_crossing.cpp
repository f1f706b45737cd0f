#include <gtest/gtest.h>

#include "fracsurf/crossing.hpp"

using namespace fracsurf;

TEST(Crossing, CircleParity) {
  const auto c = make_circle(Vec2(0, 0), 1.0);
  EXPECT_TRUE(classify_pair(c, Vec2(0, 0), Vec2(2, 0.3)).odd());
  EXPECT_EQ(classify_pair(c, Vec2(-2, 0.1), Vec2(2, 0.3)).kind, PairClass::Even);
  EXPECT_EQ(classify_pair(c, Vec2(0, 0), Vec2(0.5, 0.1)).kind, PairClass::Even);
}

TEST(Crossing, Symmetric) {
  const auto c = make_circle(Vec2(0, 0), 1.0);
  const Vec2 x(0.1, -0.2), y(1.7, 0.9);
  EXPECT_EQ(classify_pair(c, x, y), classify_pair(c, y, x));
}

TEST(Crossing, TangentIsDegenerate) {
  const auto c = make_circle(Vec2(0, 0), 1.0);
  const PairClass p = classify_pair(c, Vec2(-2, 1), Vec2(2, 1));
  EXPECT_TRUE(p.degenerate());
}

TEST(Crossing, PolylineJointIsDegenerate) {
  const auto p = make_polyline({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1)}, false);
  EXPECT_TRUE(classify_pair(p, Vec2(0, 1), Vec2(2, -1)).degenerate());
}

TEST(Crossing, MeshParity) {
  const auto m = make_sphere_mesh(Vec3(0, 0, 0), 1.0, 2);
  EXPECT_TRUE(classify_pair(m, Vec3(0.01, 0.02, 0.03), Vec3(2.1, 0.33, 0.17)).odd());
  EXPECT_EQ(classify_pair(m, Vec3(-2.1, 0.13, 0.07), Vec3(2.1, 0.33, 0.17)).kind, PairClass::Even);
}

TEST(Crossing, EndpointOnSurface) {
  const auto c = make_circle(Vec2(0, 0), 1.0);
  const auto r = segment_crossings(c, Vec2(1, 0), Vec2(3, 0.2));
  ASSERT_TRUE(r.degenerate.has_value());
  EXPECT_EQ(*r.degenerate, Degeneracy::EndpointOnSurface);
}

TEST(Crossing, HatChiOnDisk) {
  // +1 inside the convex set for the outward normal, -1 outside
  const auto c = make_circle(Vec2(0, 0), 1.0);
  const Vec2 z(1, 0);
  EXPECT_EQ(hat_chi(c, z, Vec2(0.5, 0.1)).value, 1);
  EXPECT_EQ(hat_chi(c, z, Vec2(1.5, 0.1)).value, -1);
  EXPECT_EQ(hat_chi(c, z, Vec2(-1.5, 0.1)).value, -1);
  EXPECT_EQ(hat_chi(c.flipped(), z, Vec2(0.5, 0.1)).value, -1);
}

TEST(Crossing, HatChiFlatIsHalfPlane) {
  const auto p = make_polyline({Vec2(-5, 0), Vec2(5, 0)}, false);
  // right-hand normal of a left-to-right segment points to -y
  EXPECT_EQ(hat_chi(p, Vec2(0, 0), Vec2(0.3, 0.2)).value, 1);
  EXPECT_EQ(hat_chi(p, Vec2(0, 0), Vec2(0.3, -0.2)).value, -1);
}

TEST(Crossing, TildeChi) {
  const auto b = SolidSet<2>::ball(Vec2(0, 0), 1.0);
  EXPECT_EQ(tilde_chi(b, Vec2(0.2, 0.2)), 1);
  EXPECT_EQ(tilde_chi(b, Vec2(2, 0)), -1);
}

TEST(Crossing, FarSignTangentDegenerate) {
  const auto c = make_circle(Vec2(0, 0), 1.0);
  EXPECT_TRUE(ray_far_sign(c, Vec2(1, 0), Vec2(0, 1)).degenerate());
  EXPECT_EQ(ray_far_sign(c, Vec2(1, 0), Vec2(-1, 0.1).normalized()).value, -1);
}

TEST(Crossing, NormalSignSpiral) {
  const auto p = make_polyline({Vec2(-2, 0), Vec2(2, 0), Vec2(2, 1), Vec2(-1.5, 1), Vec2(-1.5, 0.5), Vec2(1, 0.5)},
                               false);
  const Vec2 z(0, 0);
  EXPECT_EQ(interior_normal_sign(p, z, Vec2(0, 1)).sigma, -1);
  EXPECT_EQ(interior_normal_sign(p, z, Vec2(0, 0.5)).sigma, -1);
  EXPECT_EQ(interior_normal_sign(p, z, Vec2(2, 0.3)).sigma, 1);
  EXPECT_EQ(interior_normal_sign(p, z, Vec2(-1.5, 0.7)).sigma, -1);
}
