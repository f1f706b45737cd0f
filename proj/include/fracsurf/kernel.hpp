#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fracsurf/core.hpp"
#include "fracsurf/geometry.hpp"

namespace fracsurf {

/// The order s in (0, 1/2) together with the normalization constants.
class FractionalOrder {
 public:
  explicit FractionalOrder(double s) : s_(s) {
    if (!(s > 0.0 && s < 0.5)) throw ValidationError("s must lie strictly between 0 and 1/2");
  }

  double s() const { return s_; }
  /// 1 - 2s.
  double t() const { return 1.0 - 2.0 * s_; }
  double kernel_exponent(int n) const { return n + 2.0 * s_; }

  /// Volume of the unit ball in R^(n-1); kappa = 1 / (alpha |x - y|^(n+2s)).
  static double alpha(int n) { return unit_ball_volume(n - 1); }
  /// Measure of the unit (n-2)-sphere used to normalize H_s.
  static double omega(int n) { return unit_sphere_measure(n - 2); }

  double kappa(int n, double r) const { return 1.0 / (alpha(n) * std::pow(r, kernel_exponent(n))); }

 private:
  double s_;
};

namespace radial {

/// x^p - y^p for x, y >= 0 without cancellation when x is close to y.
inline double pow_diff(double x, double y, double p) {
  if (x == y) return 0.0;
  if (y == 0.0) return std::pow(x, p);
  if (x == 0.0) return -std::pow(y, p);
  return std::pow(y, p) * std::expm1(p * std::log(x / y));
}

/// Integral of r^(-1-2s) over [a, b], 0 < a <= b <= inf.
inline double shell(double a, double b, double s) {
  if (b == kInf) return std::pow(a, -2.0 * s) / (2.0 * s);
  return pow_diff(a, b, -2.0 * s) / (2.0 * s);
}

/// G(d) = d^(1-2s) / (2s (1-2s)), so that G'' = d^(-1-2s).
inline double G(double d, double s) {
  const double t = 1.0 - 2.0 * s;
  return d <= 0.0 ? 0.0 : std::pow(d, t) / (2.0 * s * t);
}

/// Integral of |xi - eta|^(-1-2s) 1{xi - eta >= delta} over eta in [a1, a2],
/// xi in [b1, b2]. With delta = 0 the intervals must satisfy b1 >= a2.
/// a1 may be -inf and b2 may be +inf (not both).
inline double pair_rect(double a1, double a2, double b1, double b2, double s, double delta = 0.0) {
  if (!(a2 > a1) || !(b2 > b1)) return 0.0;
  const double t = 1.0 - 2.0 * s;
  const double c = 1.0 / (2.0 * s * t);
  const double gp = delta > 0.0 ? std::pow(delta, -2.0 * s) / (2.0 * s) : 0.0;
  const double gdelta = delta > 0.0 ? G(delta, s) : 0.0;
  auto gd = [&](double d) {
    if (delta <= 0.0) return d <= 0.0 ? 0.0 : c * std::pow(d, t);
    if (d <= delta) return 0.0;
    return G(d, s) - gdelta - gp * (d - delta);
  };
  // G_delta(x) - G_delta(y) for finite x, y.
  auto diff = [&](double x, double y) {
    if (delta <= 0.0) return c * pow_diff(std::max(x, 0.0), std::max(y, 0.0), t);
    if (x > delta && y > delta) return c * pow_diff(x, y, t) - gp * (x - y);
    return gd(x) - gd(y);
  };
  const bool a_inf = a1 == -kInf, b_inf = b2 == kInf;
  if (a_inf && b_inf) return kInf;
  if (b_inf) return gp * (a2 - a1) - diff(b1 - a2, b1 - a1);
  if (a_inf) return diff(b2 - a2, b1 - a2) + gp * (b2 - b1);
  return diff(b2 - a2, b1 - a2) - diff(b2 - a1, b1 - a1);
}

/// Same integral restricted to xi - eta < delta (delta > 0, b1 >= a2).
inline double pair_rect_near(double a1, double a2, double b1, double b2, double s, double delta) {
  if (!(a2 > a1) || !(b2 > b1)) return 0.0;
  if (b1 - a2 >= delta) return 0.0;
  // Pairs cut away here all have xi - eta >= delta.
  const double hb = std::min(b2, a2 + delta);
  const double la = std::max(a1, b1 - delta);
  return pair_rect(la, a2, b1, hb, s, 0.0) - pair_rect(la, a2, b1, hb, s, delta);
}

}  // namespace radial

// ---------------------------------------------------------------------------
// Interval sets on a line
// ---------------------------------------------------------------------------

/// Sorted disjoint union of closed intervals (ends may be infinite).
class IntervalSet {
 public:
  IntervalSet() = default;
  static IntervalSet all() { return IntervalSet({Interval{-kInf, kInf}}); }
  static IntervalSet of(const std::optional<Interval>& i) {
    if (!i || !(i->hi > i->lo)) return {};
    return IntervalSet({*i});
  }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }

  IntervalSet complement() const {
    std::vector<Interval> out;
    double start = -kInf;
    for (const auto& p : parts_) {
      if (p.lo > start) out.push_back({start, p.lo});
      start = p.hi;
    }
    if (start < kInf) out.push_back({start, kInf});
    return IntervalSet(std::move(out));
  }

  IntervalSet intersect(const IntervalSet& o) const {
    std::vector<Interval> out;
    std::size_t i = 0, j = 0;
    while (i < parts_.size() && j < o.parts_.size()) {
      const double lo = std::max(parts_[i].lo, o.parts_[j].lo);
      const double hi = std::min(parts_[i].hi, o.parts_[j].hi);
      if (hi > lo) out.push_back({lo, hi});
      if (parts_[i].hi < o.parts_[j].hi) ++i;
      else ++j;
    }
    return IntervalSet(std::move(out));
  }

  IntervalSet minus(const IntervalSet& o) const { return intersect(o.complement()); }

  bool bounded() const { return parts_.empty() || (parts_.front().lo > -kInf && parts_.back().hi < kInf); }

 private:
  explicit IntervalSet(std::vector<Interval> p) : parts_(std::move(p)) {}
  std::vector<Interval> parts_;
};

/// Integral of |xi - eta|^(-1-2s) over A x B for disjoint interval sets.
inline double interval_interaction(const IntervalSet& a, const IntervalSet& b, double s) {
  double total = 0.0;
  for (const auto& p : a.parts())
    for (const auto& q : b.parts()) {
      if (q.lo >= p.hi) total += radial::pair_rect(p.lo, p.hi, q.lo, q.hi, s);
      else if (p.lo >= q.hi) total += radial::pair_rect(q.lo, q.hi, p.lo, p.hi, s);
      else return kInf;  // overlapping sets
    }
  return total;
}

}  // namespace fracsurf
