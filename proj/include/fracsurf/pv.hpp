#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "fracsurf/crossing.hpp"
#include "fracsurf/extrapolation.hpp"
#include "fracsurf/kernel.hpp"
#include "fracsurf/quadrature_rules.hpp"

namespace fracsurf {

struct PVDiagnostics {
  std::vector<double> epsilons;      // eps_k = R_enc 2^-k
  std::vector<double> shell_values;  // partial sums over |y - z| > eps_k, tail included
  double tail = 0.0;
  std::size_t degenerate_nodes = 0;
  std::size_t total_nodes = 0;
  double extrapolation_correction = 0.0;
  double refinement_change = 0.0;
};

struct PVEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
  PVDiagnostics diagnostics;
};

struct PVConfig {
  int shells = 24;         // number of geometric shells K
  int graded_levels = 24;  // geometric panels of the graded angular rule
  int gauss_nodes = 12;    // Gauss nodes per panel
  int azimuth_nodes = 64;  // azimuthal nodes (n = 3)
  int uniform_nodes = 0;   // > 0: equally spaced angles instead of the graded rule
  double error_cap = kInf;
  double max_degenerate_fraction = 1e-2;
  Execution exec;
};

/// A pair of rays from z whose signs cancel near z, with quadrature weight.
/// ja, jb are small perturbations used once when a ray is degenerate.
template <int N>
struct RayPair {
  Vec<N> a;
  Vec<N> b;
  double w = 0.0;
  Vec<N> ja;
  Vec<N> jb;
};

inline constexpr double kJitter = 1e-7;

namespace detail {

inline Rule1D coarse_or_fine(double a, double b, const std::vector<double>& breaks, bool sa, bool sb,
                             const PVConfig& cfg, double s, bool coarse) {
  const int m = coarse ? std::max(2, cfg.gauss_nodes / 2) : cfg.gauss_nodes;
  return composite_rule(a, b, breaks, sa, sb, cfg.graded_levels, m, s);
}

inline double node_spacing(const Rule1D& r, std::size_t i) {
  double h = kInf;
  if (i > 0) h = std::min(h, r.x[i] - r.x[i - 1]);
  if (i + 1 < r.size()) h = std::min(h, r.x[i + 1] - r.x[i]);
  return std::isfinite(h) ? h : r.w[i];
}

}  // namespace detail

/// Antipodal pairs (u, -u) covering the sphere once. In the plane, u makes the
/// angle psi in (0, pi) with the tangent; `breaks` are extra panel ends in psi.
/// In space psi in (0, pi/2] is the elevation above the tangent plane and the
/// azimuth is uniform. The frame is built from the geometric normal so that
/// reversing the orientation leaves the node set unchanged.
template <int N>
std::vector<RayPair<N>> volume_pairs(const Vec<N>& n_geom, double s, const std::vector<double>& breaks,
                                     const PVConfig& cfg, bool coarse) {
  std::vector<RayPair<N>> out;
  if constexpr (N == 2) {
    const Vec2 t(-n_geom.y(), n_geom.x());
    Rule1D r;
    if (cfg.uniform_nodes > 0) {
      const int pairs = std::max(1, (coarse ? cfg.uniform_nodes / 2 : cfg.uniform_nodes) / 2);
      for (int i = 0; i < pairs; ++i) {
        r.x.push_back((i + 0.5) * kPi / pairs);
        r.w.push_back(kPi / pairs);
      }
    } else {
      r = detail::coarse_or_fine(0.0, kPi, breaks, true, true, cfg, s, coarse);
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double psi = r.x[i];
      const Vec2 u = std::cos(psi) * t + std::sin(psi) * n_geom;
      const Vec2 du = (-std::sin(psi) * t + std::cos(psi) * n_geom) * (kJitter * detail::node_spacing(r, i));
      out.push_back({u, -u, r.w[i], du, -du});
    }
  } else {
    const Vec3 t1 = any_orthogonal<3>(n_geom);
    const Vec3 t2 = n_geom.cross(t1).normalized();
    Rule1D r;
    if (cfg.uniform_nodes > 0) {
      // Gauss in sin(psi) on (0, 1]: weight cos(psi) d psi = d sin(psi).
      const Rule1D g = gauss_legendre(coarse ? std::max(2, cfg.gauss_nodes / 2) : cfg.gauss_nodes, 0.0, 1.0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        r.x.push_back(std::asin(g.x[i]));
        r.w.push_back(g.w[i] / std::cos(r.x.back()));
      }
    } else {
      r = detail::coarse_or_fine(0.0, 0.5 * kPi, {}, true, false, cfg, s, coarse);
    }
    const int m = coarse ? std::max(4, cfg.azimuth_nodes / 2) : cfg.azimuth_nodes;
    const Rule1D phi = uniform_circle_rule(m);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double psi = r.x[i];
      for (std::size_t j = 0; j < phi.size(); ++j) {
        const Vec3 e = std::cos(phi.x[j]) * t1 + std::sin(phi.x[j]) * t2;
        const Vec3 u = std::cos(psi) * e + std::sin(psi) * n_geom;
        const Vec3 du = (-std::sin(psi) * e + std::cos(psi) * n_geom) * (kJitter * detail::node_spacing(r, i));
        out.push_back({u, -u, r.w[i] * std::cos(psi) * phi.w[j], du, -du});
      }
    }
  }
  return out;
}

/// Pairs (u+, u-) = cos(theta) e +- sin(theta) n in the half-plane through z
/// spanned by e and the normal, theta in (0, pi/2]. The weight carries the
/// factor |y' - z|^(n-2) / r^(n-2) = cos(theta)^(n-2).
template <int N>
std::vector<RayPair<N>> directional_pairs(const Vec<N>& n_geom, const Vec<N>& e, double s,
                                          const std::vector<double>& breaks, const PVConfig& cfg, bool coarse) {
  std::vector<RayPair<N>> out;
  Rule1D r;
  if (cfg.uniform_nodes > 0) {
    const int k = std::max(1, (coarse ? cfg.uniform_nodes / 2 : cfg.uniform_nodes) / 4);
    for (int i = 0; i < k; ++i) {
      r.x.push_back((i + 0.5) * 0.5 * kPi / k);
      r.w.push_back(0.5 * kPi / k);
    }
  } else {
    r = detail::coarse_or_fine(0.0, 0.5 * kPi, breaks, true, false, cfg, s, coarse);
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double th = r.x[i], c = std::cos(th), sn = std::sin(th);
    const Vec<N> up = c * e + sn * n_geom, um = c * e - sn * n_geom;
    const double h = kJitter * detail::node_spacing(r, i);
    const Vec<N> jp = (-sn * e + c * n_geom) * h, jm = (-sn * e - c * n_geom) * h;
    const double w = N == 3 ? r.w[i] * c : r.w[i];
    out.push_back({up, um, w, jp, jm});
  }
  return out;
}

/// Sum over ray pairs from z of the exact radial integrals of
/// (sign_a(r) + sign_b(r)) r^(-1-2s), where the sign along each ray starts at
/// -sgn(u . n(z)) and flips at every crossing of S.
struct PairSums {
  double value = 0.0;
  double abs_sum = 0.0;
  double tail = 0.0;
  std::vector<double> shells;  // contribution of [eps_(k+1), eps_k], k < K
  std::size_t degenerate = 0;
  std::size_t total = 0;
};

template <int N>
PairSums ray_pair_sums(const RayCaster<N>& caster, const Vec<N>& nz, const std::vector<RayPair<N>>& pairs, double s,
                       double r_enc, int shells, const Execution& exec) {
  const std::size_t count = pairs.size();
  std::vector<double> terms(count, 0.0), tails(count, 0.0);
  std::vector<std::vector<double>> shell_terms(count);
  std::vector<char> bad(count, 0);
  parallel_for(count, exec, [&](std::size_t i) {
    std::vector<double> ta, tb;
    Vec<N> ua = pairs[i].a, ub = pairs[i].b;
    for (int attempt = 0; attempt < 2; ++attempt) {
      if (attempt == 1) {
        ua = (pairs[i].a + pairs[i].ja).normalized();
        ub = (pairs[i].b + pairs[i].jb).normalized();
      }
      const double na = ua.dot(nz), nb = ub.dot(nz);
      if (na == 0.0 || nb == 0.0) continue;
      if (caster.cast_from_surface(ua, kInf, ta)) continue;
      if (caster.cast_from_surface(ub, kInf, tb)) continue;
      int sa = na < 0.0 ? 1 : -1, sb = nb < 0.0 ? 1 : -1;
      // Merge the two crossing lists.
      std::vector<double> cuts;
      std::vector<int> which;
      std::size_t p = 0, q = 0;
      while (p < ta.size() || q < tb.size()) {
        if (q >= tb.size() || (p < ta.size() && ta[p] <= tb[q])) {
          cuts.push_back(ta[p++]);
          which.push_back(0);
        } else {
          cuts.push_back(tb[q++]);
          which.push_back(1);
        }
      }
      std::vector<double> sh(shells, 0.0);
      double total = 0.0, prev = 0.0;
      auto add = [&](double lo, double hi, int sum) {
        if (sum == 0 || !(hi > lo)) return;
        total += sum * radial::shell(lo, hi, s);
        // Shell bookkeeping for diagnostics.
        double hi_k = r_enc;
        for (int k = 0; k < shells; ++k) {
          const double lo_k = 0.5 * hi_k;
          const double a = std::max(lo, lo_k), b = std::min(hi, hi_k);
          if (b > a) sh[k] += sum * radial::shell(a, b, s);
          hi_k = lo_k;
          if (hi_k <= lo) break;
        }
      };
      for (std::size_t k = 0; k < cuts.size(); ++k) {
        add(prev, cuts[k], sa + sb);
        if (which[k] == 0) sa = -sa;
        else sb = -sb;
        prev = cuts[k];
      }
      add(prev, kInf, sa + sb);
      terms[i] = pairs[i].w * total;
      tails[i] = pairs[i].w * (sa + sb) * std::pow(r_enc, -2.0 * s) / (2.0 * s);
      for (auto& v : sh) v *= pairs[i].w;
      shell_terms[i] = std::move(sh);
      return;
    }
    bad[i] = 1;
  });
  PairSums out;
  out.total = count;
  out.shells.assign(shells, 0.0);
  std::vector<double> abs_terms(count), col(count);
  for (std::size_t i = 0; i < count; ++i) {
    abs_terms[i] = std::abs(terms[i]);
    out.degenerate += bad[i];
  }
  out.value = ordered_sum(terms);
  out.abs_sum = ordered_sum(abs_terms);
  out.tail = ordered_sum(tails);
  for (int k = 0; k < shells; ++k) {
    for (std::size_t i = 0; i < count; ++i) col[i] = shell_terms[i].empty() ? 0.0 : shell_terms[i][k];
    out.shells[k] = ordered_sum(col);
  }
  return out;
}

/// Assembles a PVEstimate from fine and coarse ray-pair sums.
inline PVEstimate pv_from_pairs(const PairSums& fine, const PairSums& coarse, double r_enc, const PVConfig& cfg) {
  PVEstimate e;
  if (fine.degenerate > cfg.max_degenerate_fraction * static_cast<double>(fine.total))
    throw ConvergenceError("too many degenerate quadrature nodes");
  e.value = fine.value;
  auto& d = e.diagnostics;
  d.tail = fine.tail;
  d.degenerate_nodes = fine.degenerate;
  d.total_nodes = fine.total;
  double eps = r_enc, partial = fine.tail;
  for (std::size_t k = 0; k < fine.shells.size(); ++k) {
    partial += fine.shells[k];
    eps *= 0.5;
    d.epsilons.push_back(eps);
    d.shell_values.push_back(partial);
  }
  d.refinement_change = std::abs(fine.value - coarse.value);
  e.error_estimate = std::max({d.refinement_change, 1e-10 * fine.abs_sum, std::numeric_limits<double>::min()});
  if (e.error_estimate > cfg.error_cap) throw ConvergenceError("principal-value error estimate above cap");
  return e;
}

// ---------------------------------------------------------------------------
// Generic sign-field route
// ---------------------------------------------------------------------------

namespace detail {

/// Integral of sign(r) r^(-1-2s) over [a, b] for a ray. Samples at both ends
/// and three interior points; radial bisection up to depth 8, then bisection
/// for each switch between neighbouring samples.
template <class Sign>
double integrate_ray_cell(Sign&& sign, double a, double b, double s, int depth, bool& bad) {
  constexpr int K = 5;
  const double ratio = b / a;
  double r[K];
  int v[K];
  for (int k = 0; k < K; ++k) {
    r[k] = k == 0 ? a : k == K - 1 ? b : a * std::pow(ratio, static_cast<double>(k) / (K - 1));
    const auto x = sign(r[k]);
    if (x.degenerate()) {
      bad = true;
      return 0.0;
    }
    v[k] = x.value;
  }
  bool uniform = true;
  for (int k = 1; k < K; ++k) uniform = uniform && v[k] == v[0];
  if (uniform) return v[0] * radial::shell(a, b, s);
  if (depth < 8) {
    const double m = std::sqrt(a * b);
    return integrate_ray_cell(sign, a, m, s, depth + 1, bad) + integrate_ray_cell(sign, m, b, s, depth + 1, bad);
  }
  std::vector<double> cuts = {a};
  std::vector<int> vals = {v[0]};
  for (int k = 0; k + 1 < K; ++k) {
    if (v[k] == v[k + 1]) continue;
    double lo = r[k], hi = r[k + 1];
    for (int it = 0; it < 60 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const auto x = sign(mid);
      if (x.degenerate()) {
        bad = true;
        return 0.0;
      }
      (x.value == v[k] ? lo : hi) = mid;
    }
    cuts.push_back(0.5 * (lo + hi));
    vals.push_back(v[k + 1]);
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) total += vals[k] * radial::shell(cuts[k], cuts[k + 1], s);
  return total;
}

}  // namespace detail

/// PV of the integral of sign_field(y) |z - y|^(-n-2s) over R^n.
///
/// sign_field: Vec<N> -> SignedIndicator; far_sign: unit Vec<N> -> SignedIndicator
/// (constant sign beyond r_enc). The near field uses geometric shells
/// eps_k = r_enc 2^-k with the radial kernel integrated exactly on each
/// ray segment of constant sign, and Richardson extrapolation in eps with
/// exponents 1-2s, 2-2s, 3-2s. With a normal the angular rule is graded toward
/// the tangent directions, otherwise it is uniform.
template <int N, class SignField, class FarSign>
PVEstimate pv_volume_integrate(SignField&& sign_field, const Vec<N>& z, const FractionalOrder& order, double r_enc,
                               FarSign&& far_sign, const PVConfig& cfg,
                               const std::optional<Vec<N>>& normal = std::nullopt) {
  if (!(r_enc > 0.0)) throw ValidationError("enclosing radius must be positive");
  const double s = order.s();
  const int K = cfg.shells;
  auto run = [&](bool coarse, PVDiagnostics& diag) {
    PVConfig c = cfg;
    if (!normal && c.uniform_nodes <= 0) c.uniform_nodes = 256;
    const Vec<N> n = normal ? *normal : Vec<N>::UnitY();
    const auto pairs = volume_pairs<N>(n, s, {}, c, coarse);
    const std::size_t count = pairs.size();
    std::vector<std::vector<double>> shell_terms(count);
    std::vector<double> tails(count, 0.0);
    std::vector<char> bad(count, 0);
    parallel_for(count, cfg.exec, [&](std::size_t i) {
      for (int attempt = 0; attempt < 2; ++attempt) {
        Vec<N> ua = pairs[i].a, ub = pairs[i].b;
        if (attempt == 1) {
          ua = (ua + pairs[i].ja).normalized();
          ub = (ub + pairs[i].jb).normalized();
        }
        const auto fa = far_sign(ua);
        const auto fb = far_sign(ub);
        if (fa.degenerate() || fb.degenerate()) continue;
        bool degenerate = false;
        std::vector<double> sh(K, 0.0);
        double hi = r_enc;
        for (int k = 0; k < K && !degenerate; ++k) {
          const double lo = 0.5 * hi;
          const double va = detail::integrate_ray_cell(
              [&](double r) { return sign_field(Vec<N>(z + r * ua)); }, lo, hi, s, 0, degenerate);
          const double vb = detail::integrate_ray_cell(
              [&](double r) { return sign_field(Vec<N>(z + r * ub)); }, lo, hi, s, 0, degenerate);
          sh[k] = pairs[i].w * (va + vb);
          hi = lo;
        }
        if (degenerate) continue;
        shell_terms[i] = std::move(sh);
        tails[i] = pairs[i].w * (fa.value + fb.value) * std::pow(r_enc, -2.0 * s) / (2.0 * s);
        return;
      }
      bad[i] = 1;
    });
    diag.total_nodes = count;
    diag.degenerate_nodes = 0;
    for (char b : bad) diag.degenerate_nodes += b;
    diag.tail = ordered_sum(tails);
    diag.epsilons.clear();
    diag.shell_values.clear();
    std::vector<double> col(count);
    double partial = diag.tail, eps = r_enc;
    for (int k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < count; ++i) col[i] = shell_terms[i].empty() ? 0.0 : shell_terms[i][k];
      partial += ordered_sum(col);
      eps *= 0.5;
      diag.epsilons.push_back(eps);
      diag.shell_values.push_back(partial);
    }
    const Extrapolated ex = richardson(diag.shell_values, {1.0 - 2.0 * s, 2.0 - 2.0 * s, 3.0 - 2.0 * s});
    diag.extrapolation_correction = ex.error;
    return ex.value;
  };
  PVEstimate e;
  PVDiagnostics coarse_diag;
  e.value = run(false, e.diagnostics);
  const double coarse = run(true, coarse_diag);
  auto& d = e.diagnostics;
  if (d.degenerate_nodes > cfg.max_degenerate_fraction * static_cast<double>(d.total_nodes))
    throw ConvergenceError("too many degenerate quadrature nodes");
  d.refinement_change = std::abs(e.value - coarse);
  double scale = 0.0;
  for (double v : d.shell_values) scale = std::max(scale, std::abs(v));
  e.error_estimate = std::max({d.extrapolation_correction, d.refinement_change, 64.0 * 2.2e-16 * scale,
                               std::numeric_limits<double>::min()});
  if (e.error_estimate > cfg.error_cap) throw ConvergenceError("principal-value error estimate above cap");
  return e;
}

}  // namespace fracsurf
