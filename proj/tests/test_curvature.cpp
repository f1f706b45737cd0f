#include <cmath>

#include <gtest/gtest.h>

#include "fixture_util.hpp"
#include "fracsurf/curvature.hpp"

using namespace fracsurf;

namespace {

const Curve2 kCircle = make_circle(Vec2(0, 0), 1.0);
const Curve2 kArc = make_arc(Vec2(0, 0), 1.0, 0.0, kPi);
const Curve2 kFlat = make_polyline({Vec2(-10, 0), Vec2(10, 0)}, false);

}  // namespace

TEST(Curvature, DiskVolumeForm) {
  const auto h = mean_curvature_volume(kCircle, Vec2(1, 0), FractionalOrder(0.25));
  EXPECT_NEAR(h.value, fixture_oracle("disk_mean_curvature_s025"), 1e-6);
  EXPECT_LT(h.error_estimate, 1e-6);
  EXPECT_LT(h.value, 0.0);
}

TEST(Curvature, DiskFluxForm) {
  const auto h = mean_curvature_flux(kCircle, Vec2(0, 1), FractionalOrder(0.25));
  EXPECT_NEAR(h.value, fixture_oracle("disk_mean_curvature_flux_s025"), 1e-5);
}

TEST(Curvature, DiskDirectionalSymmetric) {
  const FractionalOrder o(0.25);
  const Vec2 z(1, 0), e(0, 1);
  const auto kp = directional_curvature(kCircle, z, e, o);
  const auto km = directional_curvature(kCircle, z, Vec2(-e), o);
  EXPECT_NEAR(kp.value, fixture_oracle("disk_directional_curvature_s025"), 1e-6);
  EXPECT_NEAR(kp.value, km.value, kp.error_estimate + km.error_estimate + 1e-12);
  const auto avg = mean_from_directional(kCircle, z, o);
  const auto h = mean_curvature_volume(kCircle, z, o);
  EXPECT_NEAR(avg.value, 0.5 * (kp.value + km.value), 1e-14);
  EXPECT_LE(std::abs(avg.value - h.value), avg.error_estimate + h.error_estimate + 1e-9);
}

TEST(Curvature, SphereVolumeForm) {
  const auto sp = make_sphere(Vec3(0, 0, 0), 1.0);
  const auto h = mean_curvature_volume(sp, Vec3(0, 0, 1), FractionalOrder(0.25));
  EXPECT_NEAR(h.value, fixture_oracle("sphere_mean_curvature_s025"), 1e-5);
}

TEST(Curvature, ArcFormsAgree) {
  for (double s : {0.1, 0.25, 0.4}) {
    const FractionalOrder o(s);
    const auto v = mean_curvature_volume(kArc, Vec2(0, 1), o);
    const auto f = mean_curvature_flux(kArc, Vec2(0, 1), o);
    EXPECT_LE(std::abs(v.value - f.value), 3.0 * (v.error_estimate + f.error_estimate) + 1e-9 * std::abs(v.value))
        << s;
  }
  EXPECT_NEAR(mean_curvature_volume(kArc, Vec2(0, 1), FractionalOrder(0.25)).value,
              fixture_oracle("arc_mean_curvature_s025"), 1e-5);
}

TEST(Curvature, FlatVanishes) {
  const FractionalOrder o(0.3);
  const Vec2 z(0.37, 0);
  EXPECT_LT(std::abs(mean_curvature_volume(kFlat, z, o).value), 1e-8);
  EXPECT_LT(std::abs(mean_curvature_flux(kFlat, z, o).value), 1e-8);
  EXPECT_LT(std::abs(directional_curvature(kFlat, z, Vec2(1, 0), o).value), 1e-8);
  EXPECT_LT(std::abs(directional_curvature(kFlat, z, Vec2(-1, 0), o).value), 1e-8);
}

TEST(Curvature, OrientationAntisymmetryBitExact) {
  const FractionalOrder o(0.25);
  const Curve2 flipped = kArc.flipped();
  const Vec2 z(std::cos(1.2), std::sin(1.2));
  EXPECT_EQ(mean_curvature_volume(flipped, z, o).value, -mean_curvature_volume(kArc, z, o).value);
  EXPECT_EQ(mean_curvature_flux(flipped, z, o).value, -mean_curvature_flux(kArc, z, o).value);
  const Vec2 e = kArc.tangent_basis_at(z)[0];
  EXPECT_EQ(directional_curvature(flipped, z, e, o).value, -directional_curvature(kArc, z, e, o).value);
  EXPECT_EQ(classical_curvature(flipped, z), -classical_curvature(kArc, z));
}

TEST(Curvature, DilationScaling) {
  const FractionalOrder o(0.25);
  const double lambda = 2.0;
  const auto h1 = mean_curvature_volume(kCircle, Vec2(1, 0), o);
  const auto h2 = mean_curvature_volume(make_circle(Vec2(0, 0), lambda), Vec2(lambda, 0), o);
  EXPECT_NEAR(h2.value / h1.value, std::pow(lambda, -2.0 * o.s()), 0.005 * std::pow(lambda, -2.0 * o.s()));
}

TEST(Curvature, BoundaryZoneRejected) {
  const Vec2 near_end(std::cos(0.05), std::sin(0.05));
  EXPECT_THROW(mean_curvature_volume(kArc, near_end, FractionalOrder(0.25)), ValidationError);
  EXPECT_THROW(mean_curvature_flux(kArc, Vec2(1, 0), FractionalOrder(0.25)), ValidationError);
}

TEST(Curvature, DirectionMustBeUnitTangent) {
  EXPECT_THROW(directional_curvature(kCircle, Vec2(1, 0), Vec2(1, 0), FractionalOrder(0.25)), ValidationError);
  EXPECT_THROW(directional_curvature(kCircle, Vec2(1, 0), Vec2(0, 2), FractionalOrder(0.25)), ValidationError);
}

TEST(Curvature, MeshAveragingIdentity) {
  const auto m = make_sphere_mesh(Vec3(0, 0, 0), 1.0, 3);
  const FractionalOrder o(0.25);
  const Vec3 z(1, 0, 0);
  const auto v = mean_curvature_volume(m, z, o);
  const auto d = mean_from_directional(m, z, o);
  EXPECT_LE(std::abs(v.value - d.value), v.error_estimate + d.error_estimate + 0.02 * std::abs(v.value));
  CurvatureConfig few;
  few.n_directions = 6;
  EXPECT_THROW(mean_from_directional(m, z, o, few), ValidationError);
}

TEST(Curvature, SphereDirectionalIsotropic) {
  const auto sp = make_sphere(Vec3(0, 0, 0), 1.0);
  const FractionalOrder o(0.25);
  const Vec3 z(0, 0, 1);
  const auto a = directional_curvature(sp, z, Vec3(1, 0, 0), o);
  const auto b = directional_curvature(sp, z, Vec3(std::sqrt(0.5), std::sqrt(0.5), 0), o);
  EXPECT_NEAR(a.value, b.value, a.error_estimate + b.error_estimate + 1e-9);
}

TEST(Curvature, ClassicalValues) {
  EXPECT_DOUBLE_EQ(classical_curvature(kCircle, Vec2(1, 0)), -1.0);
  EXPECT_DOUBLE_EQ(classical_curvature(make_arc(Vec2(0, 0), 2.0, 0.0, kPi), Vec2(0, 2)), -0.5);
  EXPECT_DOUBLE_EQ(classical_curvature(make_sphere(Vec3(0, 0, 0), 1.0), Vec3(1, 0, 0)), -1.0);
  EXPECT_THROW(classical_curvature(kFlat, Vec2(0, 0)), ValidationError);
}

TEST(Curvature, LocalLimitCircle) {
  const auto r = local_limit_estimate(kCircle, Vec2(1, 0), {0.3, 0.4, 0.45, 0.49}, LimitKind::Mean);
  EXPECT_NEAR(r.limit.value, -1.0, 0.02);
  for (const auto& p : r.points) EXPECT_LT(p.value, 0.0);
}

TEST(Curvature, StationarityResidual) {
  const FractionalOrder o(0.25);
  const auto flat = stationarity_residual(kFlat, o, {Vec2(0, 0), Vec2(1.5, 0)});
  EXPECT_LT(flat.residual, 1e-6);
  const auto circ = stationarity_residual(kCircle, o, {Vec2(1, 0)});
  EXPECT_NEAR(circ.residual, -fixture_oracle("disk_mean_curvature_s025"), 1e-6);
  EXPECT_EQ(stationarity_residual(kCircle.flipped(), o, {Vec2(1, 0)}).residual, circ.residual);
}
