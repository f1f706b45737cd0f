#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fracsurf/crossing.hpp"
#include "fracsurf/kernel.hpp"
#include "fracsurf/montecarlo.hpp"
#include "fracsurf/surface_pv.hpp"
#include "fracsurf/quadrature_rules.hpp"

namespace fracsurf {

/// Which part of the kernel to integrate: all pairs, |x - y| < delta, or |x - y| >= delta.
enum class PairPart { Full, Near, Far };

/// Pair integral along the line z + l u through a crossing point z, in the
/// coordinates x = z + xi u (xi > 0), y = z + eta u (eta < 0):
///
///   sum over cells with an odd crossing count k of
///   (1/k) * integral of (xi - eta)^(-1-2s)
///
/// `plus` and `minus` are the (positive, sorted) distances of the other
/// crossings on either side of z. With a window chord [w_lo, w_hi] around z,
/// pairs with both x and y outside the window are dropped.
inline double cov_line_integral(const std::vector<double>& plus, const std::vector<double>& minus, double s,
                                PairPart part, double delta, const std::optional<Interval>& window) {
  std::vector<double> xb = {0.0}, eb = {0.0};
  xb.insert(xb.end(), plus.begin(), plus.end());
  xb.push_back(kInf);
  eb.insert(eb.end(), minus.begin(), minus.end());
  eb.push_back(kInf);
  const double w_hi = window ? window->hi : kInf;
  const double w_lo = window ? window->lo : -kInf;
  auto piece = [&](double a1, double a2, double b1, double b2) {
    switch (part) {
      case PairPart::Full: return radial::pair_rect(a1, a2, b1, b2, s, 0.0);
      case PairPart::Far: return radial::pair_rect(a1, a2, b1, b2, s, delta);
      case PairPart::Near: return radial::pair_rect_near(a1, a2, b1, b2, s, delta);
    }
    return 0.0;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xb.size(); ++i) {
    for (std::size_t j = 0; j + 1 < eb.size(); ++j) {
      if ((i + j) % 2 != 0) continue;
      const double b1 = xb[i], b2 = xb[i + 1];
      const double a1 = -eb[j + 1], a2 = -eb[j];
      if (part == PairPart::Near && b1 - a2 >= delta) continue;
      // Split at the window ends so that the "both outside" piece can be dropped.
      const double xs[3] = {b1, std::clamp(w_hi, b1, b2), b2};
      const double es[3] = {a1, std::clamp(w_lo, a1, a2), a2};
      double cell = 0.0;
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          const double lo_x = xs[p], hi_x = xs[p + 1], lo_e = es[q], hi_e = es[q + 1];
          if (!(hi_x > lo_x) || !(hi_e > lo_e)) continue;
          if (lo_x >= w_hi && hi_e <= w_lo) continue;
          cell += piece(lo_e, hi_e, lo_x, hi_x);
        }
      total += cell / static_cast<double>(1 + i + j);
    }
  }
  return total;
}

/// Crossings of the two rays z +- l u, l in (0, reach), in surface mode.
template <int N>
std::optional<Degeneracy> line_crossings(const RayCaster<N>& caster, const Vec<N>& u, double reach,
                                         std::vector<double>& plus, std::vector<double>& minus) {
  if (auto bad = caster.cast_from_surface(u, reach, plus)) return bad;
  return caster.cast_from_surface(Vec<N>(-u), reach, minus);
}

/// Monte-Carlo mean of |u . n(z)| * cov_line_integral over z uniform on S and
/// u uniform on the unit sphere. Multiply by |S| omega_(n-1) / alpha_(n-1) to
/// get the pair integral over X(S).
template <int N>
Estimate cov_mc_mean(const OrientedSurface<N>& surf, double s, PairPart part, double delta,
                     const std::optional<Region<N>>& window, std::uint64_t n, std::uint64_t seed,
                     std::uint64_t stream, const Execution& exec) {
  return mc_mean(n, seed, stream, exec, [&](Rng& rng) -> std::optional<double> {
    const SurfaceSample<N> zs = surf.sample(rng);
    const Vec<N> u = random_direction<N>(rng);
    const double un = std::abs(u.dot(zs.normal));
    if (un < kTolTangent) return std::nullopt;
    if (surf.distance_to_boundary(zs.point) <= surf.tol_hit()) return std::nullopt;
    const RayCaster<N> caster(surf, zs.point);
    std::vector<double> plus, minus;
    const double reach = part == PairPart::Near ? delta : kInf;
    if (line_crossings(caster, u, reach, plus, minus)) return std::nullopt;
    std::optional<Interval> chord;
    if (window) {
      chord = window->chord(zs.point, u);
      if (!chord) return std::nullopt;
    }
    return un * cov_line_integral(plus, minus, s, part, delta, chord);
  });
}

/// True when no sampled non-grazing line (|u . n| >= 0.1) through a point of S
/// meets S again within distance delta.
template <int N>
bool single_crossing_holds(const OrientedSurface<N>& surf, double delta, int samples, std::uint64_t seed) {
  Rng rng(seed, 0x5eed);
  std::vector<double> plus, minus;
  for (int k = 0; k < samples; ++k) {
    const SurfaceSample<N> zs = surf.sample(rng);
    Vec<N> u = random_direction<N>(rng);
    if (std::abs(u.dot(zs.normal)) < 0.1) continue;
    if (surf.distance_to_boundary(zs.point) <= surf.tol_hit()) continue;
    const RayCaster<N> caster(surf, zs.point);
    if (line_crossings(caster, u, delta, plus, minus)) continue;
    if (!plus.empty() || !minus.empty()) return false;
  }
  return true;
}

struct CovConfig {
  int surface_panels = 32;
  int angular_panels = 64;
  int gauss_nodes = 8;
  int azimuth_nodes = 32;
  int validation_samples = 4000;
  std::uint64_t seed = 1;
  Execution exec;
};

namespace detail {

/// Points of S with weights (surface measure) and oriented normals.
template <int N>
std::vector<SurfaceNode<N>> cov_surface_rule(const OrientedSurface<N>& surf, const CovConfig& cfg, bool coarse) {
  std::vector<SurfaceNode<N>> out;
  const int m = coarse ? std::max(2, cfg.gauss_nodes / 2) : cfg.gauss_nodes;
  const double o = static_cast<double>(surf.orientation());
  if constexpr (N == 2) {
    if (const auto* c = std::get_if<AnalyticCircle>(&surf.representation())) {
      const Rule1D r = uniform_circle_rule(cfg.surface_panels * m);
      for (std::size_t i = 0; i < r.size(); ++i) {
        const Vec2 u(std::cos(r.x[i]), std::sin(r.x[i]));
        out.push_back({c->center + c->radius * u, o * u, c->radius * r.w[i]});
      }
    } else if (const auto* a = std::get_if<AnalyticArc>(&surf.representation())) {
      const double span = a->angle_end - a->angle_start;
      for (int p = 0; p < cfg.surface_panels; ++p) {
        const Rule1D g = gauss_legendre(m, span * p / cfg.surface_panels, span * (p + 1) / cfg.surface_panels);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double ang = a->angle_start + g.x[i];
          const Vec2 u(std::cos(ang), std::sin(ang));
          out.push_back({a->center + a->radius * u, o * u, a->radius * g.w[i]});
        }
      }
    } else {
      const auto& d = surf.data();
      const double total = surf.classical_measure();
      for (int i = 0; i < surf.segment_count(); ++i) {
        const auto [p, q] = surf.segment(i);
        const double len = d.element_measures[i];
        const int panels = std::max(1, static_cast<int>(std::ceil(cfg.surface_panels * len / total)));
        for (int k = 0; k < panels; ++k) {
          const Rule1D g = gauss_legendre(m, len * k / panels, len * (k + 1) / panels);
          for (std::size_t j = 0; j < g.size(); ++j)
            out.push_back({p + (g.x[j] / len) * (q - p), o * d.element_normals[i], g.w[j]});
        }
      }
    }
  } else {
    if (const auto* sp = std::get_if<AnalyticSphere>(&surf.representation())) {
      const Rule1D mu = gauss_legendre(cfg.surface_panels / 2 * m / 4 + 2, -1.0, 1.0);
      const Rule1D phi = uniform_circle_rule(coarse ? cfg.azimuth_nodes / 2 : cfg.azimuth_nodes);
      const double r2 = sp->radius * sp->radius;
      for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < phi.size(); ++j) {
          const double st = std::sqrt(std::max(0.0, 1.0 - mu.x[i] * mu.x[i]));
          const Vec3 u(st * std::cos(phi.x[j]), st * std::sin(phi.x[j]), mu.x[i]);
          out.push_back({sp->center + sp->radius * u, o * u, r2 * mu.w[i] * phi.w[j]});
        }
    } else {
      const auto& mesh = std::get<TriMesh3D>(surf.representation());
      const auto& d = surf.data();
      const Rule1D g = gauss_legendre(coarse ? 1 : 2, 0.0, 1.0);
      for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
        const auto& t = mesh.triangles[f];
        fan_nodes<3>(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], Vec3(o * d.element_normals[f]), g,
                     g, out);
      }
    }
  }
  return out;
}

}  // namespace detail

struct CovEstimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t degenerate = 0;
  std::size_t total = 0;
};

/// Integral of kappa(x, y) max{chi_Omega(x), chi_Omega(y)} over pairs of X(S)
/// with |x - y| < delta (no factor 1/2), by a deterministic rule in (z, u) and
/// exact integration in (xi, eta).
template <int N>
CovEstimate cov_near_diagonal_integral(const OrientedSurface<N>& surf, const std::optional<Region<N>>& omega,
                                       const FractionalOrder& order, double delta, const CovConfig& cfg) {
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  if (!single_crossing_holds(surf, delta, cfg.validation_samples, cfg.seed))
    throw ValidationError("delta too large: a short non-grazing segment crosses S more than once");
  const double s = order.s();
  auto run = [&](bool coarse, CovEstimate& est) {
    const auto zs = detail::cov_surface_rule<N>(surf, cfg, coarse);
    const int m = coarse ? std::max(2, cfg.gauss_nodes / 2) : cfg.gauss_nodes;
    // Directions relative to the normal: u = cos(th) n + sin(th) e.
    Rule1D th;
    if constexpr (N == 2) {
      const int panels = cfg.angular_panels;
      for (int p = 0; p < panels; ++p) th.append(gauss_legendre(m, 2.0 * kPi * p / panels, 2.0 * kPi * (p + 1) / panels));
    } else {
      const int panels = cfg.angular_panels / 4;
      for (int p = 0; p < panels; ++p) th.append(gauss_legendre(m, kPi * p / panels, kPi * (p + 1) / panels));
    }
    const Rule1D phi = uniform_circle_rule(N == 3 ? (coarse ? cfg.azimuth_nodes / 2 : cfg.azimuth_nodes) : 1);
    std::vector<double> terms(zs.size(), 0.0);
    std::vector<std::size_t> bad(zs.size(), 0), tot(zs.size(), 0);
    parallel_for(zs.size(), cfg.exec, [&](std::size_t i) {
      const auto& node = zs[i];
      if (surf.distance_to_boundary(node.y) <= surf.tol_hit()) return;
      const RayCaster<N> caster(surf, node.y);
      const Vec<N> n = node.normal;
      const Vec<N> e1 = any_orthogonal<N>(n);
      std::vector<double> plus, minus, vals;
      for (std::size_t a = 0; a < th.size(); ++a) {
        for (std::size_t b = 0; b < phi.size(); ++b) {
          Vec<N> e = e1;
          if constexpr (N == 3) e = std::cos(phi.x[b]) * e1 + std::sin(phi.x[b]) * n.cross(e1);
          double weight = th.w[a] * (N == 3 ? std::sin(th.x[a]) * phi.w[b] : 1.0);
          ++tot[i];
          std::optional<double> got;
          for (int attempt = 0; attempt < 2 && !got; ++attempt) {
            const double ang = th.x[a] + (attempt ? kJitter * th.w[a] : 0.0);
            const Vec<N> u = std::cos(ang) * n + std::sin(ang) * e;
            const double un = std::abs(u.dot(n));
            if (un == 0.0) {
              got = 0.0;
              break;
            }
            if (line_crossings(caster, u, delta, plus, minus)) continue;
            std::optional<Interval> chord;
            if (omega) chord = omega->chord(node.y, u);
            got = un * cov_line_integral(plus, minus, s, PairPart::Near, delta, chord);
          }
          if (!got) {
            ++bad[i];
            continue;
          }
          vals.push_back(weight * *got);
        }
      }
      terms[i] = node.w * ordered_sum(vals);
    });
    est.degenerate = 0;
    est.total = 0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      est.degenerate += bad[i];
      est.total += tot[i];
    }
    return ordered_sum(terms) / FractionalOrder::alpha(N);
  };
  CovEstimate fine, coarse;
  fine.value = run(false, fine);
  coarse.value = run(true, coarse);
  if (fine.degenerate > 1e-2 * static_cast<double>(fine.total))
    throw ConvergenceError("too many degenerate (z, u) nodes in the near-diagonal rule");
  fine.error = std::max(std::abs(fine.value - coarse.value), 1e-12 * std::abs(fine.value));
  return fine;
}

}  // namespace fracsurf
