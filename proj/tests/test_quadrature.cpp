#include <cmath>

#include <gtest/gtest.h>

#include "fracsurf/quadrature.hpp"

using namespace fracsurf;

TEST(Quadrature, GaussLegendreExactness) {
  const Rule1D r = gauss_legendre(8, 0.0, 2.0);
  // exact for degree 15
  EXPECT_NEAR(r.apply([](double x) { return std::pow(x, 15); }), std::pow(2.0, 16) / 16.0, 1e-9);
  EXPECT_NEAR(r.apply([](double) { return 1.0; }), 2.0, 1e-14);
}

TEST(Quadrature, GradedRulePowerLaw) {
  for (double s : {0.1, 0.25, 0.4}) {
    const Rule1D r = graded_rule(0.0, 1.0, 30, 8, s);
    const double exact = 1.0 / (1.0 - 2.0 * s);
    EXPECT_NEAR(r.apply([&](double x) { return std::pow(x, -2.0 * s); }), exact, 1e-10 * exact) << s;
    for (double x : r.x) EXPECT_GT(x, 0.0);
  }
}

TEST(Quadrature, GradedRuleRightMirror) {
  const Rule1D r = graded_rule_right(0.0, 1.0, 30, 8, 0.25);
  EXPECT_NEAR(r.apply([](double x) { return std::pow(1.0 - x, -0.5); }), 2.0, 1e-10);
}

TEST(Quadrature, CompositeRuleBreaks) {
  const Rule1D r = composite_rule(0.0, 2.0, {0.5, 1.0}, true, false, 30, 8, 0.25);
  EXPECT_NEAR(r.apply([](double x) { return std::pow(x, -0.5) + std::abs(x - 1.0); }),
              2.0 * std::sqrt(2.0) + 1.0, 1e-9);
}

TEST(Quadrature, ShellIntegral) {
  EXPECT_NEAR(radial::shell(1.0, 4.0, 0.25), 2.0 * (1.0 - 0.5), 1e-15);
  EXPECT_NEAR(radial::shell(4.0, kInf, 0.25), 2.0 * 0.5, 1e-15);
  EXPECT_EQ(radial::shell(2.0, 2.0, 0.25), 0.0);
}

namespace {

double pair_numeric(double a1, double a2, double b1, double b2, double s) {
  const Rule1D ga = gauss_legendre(40, a1, a2), gb = gauss_legendre(40, b1, b2);
  return ga.apply([&](double eta) { return gb.apply([&](double xi) { return std::pow(xi - eta, -1.0 - 2.0 * s); }); });
}

}  // namespace

TEST(Quadrature, PairRectFinite) {
  for (double s : {0.1, 0.25, 0.4})
    EXPECT_NEAR(radial::pair_rect(0.0, 1.0, 1.5, 3.0, s), pair_numeric(0.0, 1.0, 1.5, 3.0, s), 1e-12) << s;
}

TEST(Quadrature, PairRectInfiniteEnd) {
  // int_0^1 int_2^inf (xi - eta)^(-1-2s) = int_0^1 (2 - eta)^(-2s) / (2s)
  const double s = 0.25;
  const Rule1D g = gauss_legendre(30, 0.0, 1.0);
  const double ref = g.apply([&](double eta) { return std::pow(2.0 - eta, -2.0 * s) / (2.0 * s); });
  EXPECT_NEAR(radial::pair_rect(0.0, 1.0, 2.0, kInf, s), ref, 1e-13);
  EXPECT_NEAR(radial::pair_rect(-kInf, -2.0, -1.0, 0.0, s), ref, 1e-13);
}

TEST(Quadrature, PairRectTouching) {
  // adjacent unit intervals: 2 G(1) - G(2) with G(d) = d^t / (2 s t)
  const double s = 0.25, t = 0.5;
  const double ref = (2.0 - std::pow(2.0, t)) / (2.0 * s * t);
  EXPECT_NEAR(radial::pair_rect(0.0, 1.0, 1.0, 2.0, s), ref, 1e-14);
}

TEST(Quadrature, PairRectNearFarSplit) {
  const double s = 0.3, d = 0.4;
  const double full = radial::pair_rect(0.0, 1.0, 1.1, 2.0, s);
  const double far = radial::pair_rect(0.0, 1.0, 1.1, 2.0, s, d);
  const double near = radial::pair_rect_near(0.0, 1.0, 1.1, 2.0, s, d);
  EXPECT_NEAR(near + far, full, 1e-13);
  EXPECT_GT(near, 0.0);
}

TEST(Quadrature, IntervalInteraction) {
  const auto a = IntervalSet::of(Interval{0.0, 1.0});
  const auto b = IntervalSet::of(Interval{1.0, 2.0});
  EXPECT_DOUBLE_EQ(interval_interaction(a, b, 0.25), interval_interaction(b, a, 0.25));
  EXPECT_EQ(interval_interaction(a, IntervalSet::of(Interval{0.5, 1.5}), 0.25), kInf);
  const auto c = a.complement();
  ASSERT_EQ(c.parts().size(), 2u);
  EXPECT_EQ(c.parts()[0].lo, -kInf);
  EXPECT_TRUE(a.bounded());
  EXPECT_FALSE(c.bounded());
}

TEST(Quadrature, RichardsonRemovesPowers) {
  std::vector<double> partial;
  for (int k = 0; k < 5; ++k) {
    const double eps = std::pow(2.0, -k);
    partial.push_back(3.0 + 0.7 * std::pow(eps, 0.5) - 0.2 * eps);
  }
  const Extrapolated e = richardson(partial, {0.5, 1.0});
  EXPECT_NEAR(e.value, 3.0, 1e-12);
}

TEST(Quadrature, ExtrapolateToZeroPolynomial) {
  const std::vector<double> x = {0.4, 0.2, 0.1, 0.02};
  std::vector<double> y;
  for (double v : x) y.push_back(1.5 - 2.0 * v + v * v);
  const Extrapolated e = extrapolate_to_zero(x, y);
  EXPECT_NEAR(e.value, 1.5, 1e-12);
}

TEST(Quadrature, FractionalOrderConstants) {
  EXPECT_THROW(FractionalOrder(0.5), ValidationError);
  EXPECT_THROW(FractionalOrder(0.0), ValidationError);
  const FractionalOrder o(0.25);
  EXPECT_DOUBLE_EQ(FractionalOrder::alpha(2), 2.0);
  EXPECT_DOUBLE_EQ(FractionalOrder::alpha(3), kPi);
  EXPECT_DOUBLE_EQ(FractionalOrder::omega(2), 2.0);
  EXPECT_DOUBLE_EQ(FractionalOrder::omega(3), 2.0 * kPi);
  EXPECT_NEAR(o.kappa(2, 2.0), 1.0 / (2.0 * std::pow(2.0, 2.5)), 1e-15);
}
