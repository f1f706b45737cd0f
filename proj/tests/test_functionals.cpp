#include <cmath>

#include <gtest/gtest.h>

#include "fixture_util.hpp"
#include "fracsurf/functionals.hpp"

using namespace fracsurf;

namespace {

double combined(double a, double b) { return std::hypot(a, b); }

}  // namespace

TEST(Perimeter, DiskMethodsAgreeWithOracle) {
  const auto disk = SolidSet<2>::ball(Vec2(0, 0), 1.0);
  const FractionalOrder o(0.25);
  const Estimate a = s_perimeter(disk, o, PerimeterMethod::SetPairs, 100000, 7);
  const Estimate b = s_perimeter(disk, o, PerimeterMethod::CrossingParity, 100000, 7);
  EXPECT_LE(std::abs(a.value - b.value), 3.0 * combined(a.std_error, b.std_error));
  const double ref = fixture_oracle("disk_s_perimeter_setpairs_s025");
  EXPECT_LE(std::abs(a.value - ref), 4.0 * a.std_error + 1e-3 * ref);
  EXPECT_LE(std::abs(b.value - ref), 4.0 * b.std_error + 1e-3 * ref);
}

TEST(Perimeter, DilationScaling) {
  // s-Per(lambda E) = lambda^(n - 2s) s-Per(E)
  const FractionalOrder o(0.3);
  const double lambda = 2.0;
  const Estimate a = s_perimeter(SolidSet<2>::ball(Vec2(0, 0), 1.0), o, PerimeterMethod::SetPairs, 100000, 3);
  const Estimate b = s_perimeter(SolidSet<2>::ball(Vec2(0, 0), lambda), o, PerimeterMethod::SetPairs, 100000, 4);
  const double f = std::pow(lambda, 2.0 - 2.0 * o.s());
  EXPECT_LE(std::abs(b.value - f * a.value), 3.0 * combined(b.std_error, f * a.std_error));
}

TEST(Perimeter, DeterministicAcrossWorkers) {
  const auto disk = SolidSet<2>::ball(Vec2(0, 0), 1.0);
  const FractionalOrder o(0.25);
  for (auto m : {PerimeterMethod::SetPairs, PerimeterMethod::CrossingParity}) {
    const Estimate a = s_perimeter(disk, o, m, 20000, 9, Execution{1});
    const Estimate b = s_perimeter(disk, o, m, 20000, 9, Execution{4});
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.std_error, b.std_error);
  }
}

TEST(Perimeter, UnboundedRejected) {
  const auto hp = SolidSet<2>::half_space(Vec2(0, 0), Vec2(0, 1));
  EXPECT_THROW(s_perimeter(hp, FractionalOrder(0.25), PerimeterMethod::SetPairs, 1000, 1), ValidationError);
}

TEST(Perimeter, RelativeHalfPlane) {
  const auto hp = SolidSet<2>::half_space(Vec2(0, 0), Vec2(0, 1));
  const auto omega = Region<2>::ball(Vec2(0, 0), 1.0);
  const Estimate e = s_perimeter_relative(hp, omega, FractionalOrder(0.25), 200000, 5);
  const double ref = fixture_oracle("halfplane_relative_perimeter_disk_s025");
  EXPECT_LE(std::abs(e.value - ref), 4.0 * e.std_error);
  EXPECT_EQ(e.bias_bound, 0.0);
}

TEST(Interaction, SquareHalves) {
  const auto a = SetExpr<2>::in(SolidSet<2>::box(Vec2(0, 0), Vec2(0.5, 1)));
  const auto b = SetExpr<2>::in(SolidSet<2>::box(Vec2(0.5, 0), Vec2(1, 1)));
  const Estimate e = interaction(a, b, FractionalOrder(0.25), 200000, 11);
  const double ref = fixture_oracle("square_halves_interaction_s025");
  EXPECT_LE(std::abs(e.value - ref), 4.0 * e.std_error + 1e-3 * ref);
}

TEST(Interaction, OverlapRejected) {
  const auto a = SetExpr<2>::in(SolidSet<2>::box(Vec2(0, 0), Vec2(0.6, 1)));
  const auto b = SetExpr<2>::in(SolidSet<2>::box(Vec2(0.5, 0), Vec2(1, 1)));
  EXPECT_THROW(interaction(a, b, FractionalOrder(0.25), 1000, 1), ValidationError);
}

TEST(Interaction, NeedsBoundedSet) {
  const auto a = SetExpr<2>::in(SolidSet<2>::half_space(Vec2(0, 0), Vec2(0, 1)));
  const auto b = SetExpr<2>::out(SolidSet<2>::half_space(Vec2(0, 0), Vec2(0, 1)));
  EXPECT_THROW(interaction(a, b, FractionalOrder(0.25), 1000, 1), ValidationError);
}

TEST(Area, ArcMatchesOracle) {
  const auto arc = make_arc(Vec2(0, 0), 1.0, 0.0, kPi);
  AreaConfig cfg;
  cfg.samples = 100000;
  cfg.seed = 3;
  const AreaEstimate a = s_area(arc, Region<2>::ball(Vec2(0, 0), 2.0), FractionalOrder(0.25), cfg);
  const double ref = fixture_oracle("arc_s_area_s025");
  EXPECT_LE(std::abs(a.value - ref), 4.0 * a.std_error + a.bias_bound + 1e-3 * ref);
  EXPECT_NEAR(a.value, 0.5 * (a.near + a.far), 1e-12 * a.value);
  EXPECT_GT(a.delta, 0.0);
}

TEST(Area, SurfaceMustLieInRegion) {
  const auto arc = make_arc(Vec2(0, 0), 1.0, 0.0, kPi);
  EXPECT_THROW(s_area(arc, Region<2>::ball(Vec2(0, 0), 0.5), FractionalOrder(0.25), AreaConfig{}), ValidationError);
}

TEST(Area, NearDiagonalFlatSegment) {
  const auto seg = make_polyline({Vec2(0, 0), Vec2(1, 0)}, false);
  const CovEstimate c = cov_near_diagonal_integral<2>(seg, std::nullopt, FractionalOrder(0.1), 0.1, CovConfig{});
  const double ref = fixture_oracle("flat_segment_near_diagonal_s010");
  EXPECT_NEAR(c.value, ref, 1e-3 * ref);
}

TEST(Sweep, GridValidation) {
  EXPECT_THROW(check_s_grid({0.3, 0.4}), ValidationError);
  EXPECT_THROW(check_s_grid({0.3, 0.4, 0.5}), ValidationError);
  EXPECT_THROW(check_s_grid({0.4, 0.3, 0.45}), ValidationError);
  EXPECT_NO_THROW(check_s_grid({0.3, 0.4, 0.45, 0.49}));
}

TEST(Sweep, ExtrapolatesScaledLimit) {
  // value = c / (1 - 2s) + d  =>  (1 - 2s) value -> c
  const auto r = scaled_limit_sweep([](double s) { return std::make_pair(3.0 / (1.0 - 2.0 * s) + 0.5, 0.0); },
                                    {0.3, 0.4, 0.45, 0.49});
  EXPECT_NEAR(r.limit.value, 3.0, 1e-10);
  ASSERT_EQ(r.points.size(), 4u);
  EXPECT_NEAR(r.points[0].scaled, 3.0 + 0.5 * 0.4, 1e-12);
}
