#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracsurf/core.hpp"

namespace fracsurf {

/// Nodes and weights of a one-dimensional rule.
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
  void append(const Rule1D& o) {
    x.insert(x.end(), o.x.begin(), o.x.end());
    w.insert(w.end(), o.w.begin(), o.w.end());
  }
  template <class F>
  double apply(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(x[i]);
    return acc;
  }
};

/// m-point Gauss-Legendre rule on [a, b] (Newton iteration on P_m).
inline Rule1D gauss_legendre(int m, double a = -1.0, double b = 1.0) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: m must be positive");
  Rule1D r;
  r.x.resize(m);
  r.w.resize(m);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = mid - half * x;
    r.w[i] = half * w;
    r.x[m - 1 - i] = mid + half * x;
    r.w[m - 1 - i] = half * w;
  }
  return r;
}

/// Composite rule on [a, b] for integrands behaving like C |x - a|^(-2s) near a.
///
/// Geometric panels [a + L 2^-(j+1), a + L 2^-j] for j < levels, each with m
/// Gauss nodes. The innermost piece [a, a + h], h = L 2^-levels, is covered by
/// one node at a + h with weight h / (1 - 2s), which integrates the leading
/// power exactly and keeps every node a distance h away from a.
inline Rule1D graded_rule(double a, double b, int levels, int m, double s) {
  Rule1D r;
  const double len = b - a;
  if (!(len > 0.0)) return r;
  const Rule1D g = gauss_legendre(m, 0.0, 1.0);
  double hi = len;
  for (int j = 0; j < levels; ++j) {
    const double lo = 0.5 * hi;
    for (int i = 0; i < m; ++i) {
      r.x.push_back(a + lo + (hi - lo) * g.x[i]);
      r.w.push_back((hi - lo) * g.w[i]);
    }
    hi = lo;
  }
  r.x.push_back(a + hi);
  r.w.push_back(hi / (1.0 - 2.0 * s));
  return r;
}

/// Mirror image of graded_rule: graded toward b instead of a.
inline Rule1D graded_rule_right(double a, double b, int levels, int m, double s) {
  Rule1D r = graded_rule(0.0, b - a, levels, m, s);
  for (auto& x : r.x) x = b - x;
  std::reverse(r.x.begin(), r.x.end());
  std::reverse(r.w.begin(), r.w.end());
  return r;
}

/// Rule on [a, b] split at `breaks` (sorted, inside (a, b)). Subintervals
/// touching a singular end are graded toward it; the others get m Gauss nodes.
inline Rule1D composite_rule(double a, double b, std::vector<double> breaks, bool singular_a, bool singular_b,
                             int levels, int m, double s) {
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double x) { return !(x > a && x < b); }),
               breaks.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> cuts;
  cuts.push_back(a);
  cuts.insert(cuts.end(), breaks.begin(), breaks.end());
  cuts.push_back(b);
  Rule1D r;
  const std::size_t last = cuts.size() - 2;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (!(hi > lo)) continue;
    const bool ga = singular_a && k == 0;
    const bool gb = singular_b && k == last;
    if (ga && gb) {
      const double mid = 0.5 * (lo + hi);
      r.append(graded_rule(lo, mid, levels, m, s));
      r.append(graded_rule_right(mid, hi, levels, m, s));
    } else if (ga) {
      r.append(graded_rule(lo, hi, levels, m, s));
    } else if (gb) {
      r.append(graded_rule_right(lo, hi, levels, m, s));
    } else {
      r.append(gauss_legendre(m, lo, hi));
    }
  }
  return r;
}

/// 2^m equally spaced angles on [0, 2 pi) with equal weights (offset by half
/// a step so that no node is aligned with the frame axes).
inline Rule1D uniform_circle_rule(int count) {
  Rule1D r;
  const double h = 2.0 * kPi / count;
  for (int i = 0; i < count; ++i) {
    r.x.push_back((i + 0.5) * h);
    r.w.push_back(h);
  }
  return r;
}

}  // namespace fracsurf
