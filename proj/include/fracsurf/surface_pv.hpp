#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fracsurf/pv.hpp"

namespace fracsurf {

template <int N>
struct SurfaceNode {
  Vec<N> y;
  Vec<N> normal;  // oriented
  double w = 0.0;
};

namespace detail {

// Nodes on the collapsed-square parametrization of triangle (p, a, b) with the
// singular corner at p: y = p + rho ((1 - tau) (a - p) + tau (b - p)).
template <int N>
void fan_nodes(const Vec<N>& p, const Vec<N>& a, const Vec<N>& b, const Vec<N>& n, const Rule1D& rho,
               const Rule1D& tau, std::vector<SurfaceNode<N>>& out) {
  const double jac = (a - p).template head<3>().cross((b - p).template head<3>()).norm();
  if (!(jac > 0.0)) return;
  for (std::size_t i = 0; i < rho.size(); ++i)
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const Vec<N> y = p + rho.x[i] * ((1.0 - tau.x[j]) * (a - p) + tau.x[j] * (b - p));
      out.push_back({y, n, rho.w[i] * tau.w[j] * rho.x[i] * jac});
    }
}

inline void triangle_nodes(const Vec3& z, const Vec3& A, const Vec3& B, const Vec3& C, const Vec3& n, int m,
                           int depth, std::vector<SurfaceNode<3>>& out) {
  const Vec3 centroid = (A + B + C) / 3.0;
  const double size = std::max({(A - B).norm(), (B - C).norm(), (C - A).norm()});
  if (depth < 4 && (centroid - z).norm() < 2.0 * size) {
    const Vec3 ab = 0.5 * (A + B), bc = 0.5 * (B + C), ca = 0.5 * (C + A);
    triangle_nodes(z, A, ab, ca, n, m, depth + 1, out);
    triangle_nodes(z, ab, B, bc, n, m, depth + 1, out);
    triangle_nodes(z, ca, bc, C, n, m, depth + 1, out);
    triangle_nodes(z, ab, bc, ca, n, m, depth + 1, out);
    return;
  }
  const Rule1D g = gauss_legendre(m, 0.0, 1.0);
  fan_nodes<3>(A, B, C, n, g, g, out);
}

}  // namespace detail

inline constexpr int kSurfaceGradedLevels = 12;

/// Quadrature nodes on S graded toward the interior point z.
template <int N>
std::vector<SurfaceNode<N>> surface_nodes(const OrientedSurface<N>& surf, const Vec<N>& z, double s,
                                          const PVConfig& cfg, bool coarse) {
  std::vector<SurfaceNode<N>> out;
  const int m = coarse ? std::max(2, cfg.gauss_nodes / 2) : cfg.gauss_nodes;
  // Beyond ~12 halvings, (z - y) . n(y) ~ |z - y|^2 is lost to rounding in
  // z - y; the endpoint node covers the rest with the leading power law.
  const int levels = std::min(cfg.graded_levels, kSurfaceGradedLevels) - (coarse ? 1 : 0);
  const double o = static_cast<double>(surf.orientation());
  if constexpr (N == 2) {
    if (const auto* c = std::get_if<AnalyticCircle>(&surf.representation())) {
      const double phi_z = detail::angle_of(z - c->center);
      const Rule1D r = composite_rule(0.0, 2.0 * kPi, {}, true, true, levels, m, s);
      for (std::size_t i = 0; i < r.size(); ++i) {
        const Vec2 u(std::cos(phi_z + r.x[i]), std::sin(phi_z + r.x[i]));
        out.push_back({c->center + c->radius * u, o * u, c->radius * r.w[i]});
      }
    } else if (const auto* a = std::get_if<AnalyticArc>(&surf.representation())) {
      const double span = a->angle_end - a->angle_start;
      const double oz = std::clamp(detail::ccw_offset(a->angle_start, detail::angle_of(z - a->center)), 0.0, span);
      Rule1D r = graded_rule_right(0.0, oz, levels, m, s);
      r.append(graded_rule(oz, span, levels, m, s));
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double ang = a->angle_start + r.x[i];
        const Vec2 u(std::cos(ang), std::sin(ang));
        out.push_back({a->center + a->radius * u, o * u, a->radius * r.w[i]});
      }
    } else {
      const double tol = surf.on_surface_tolerance();
      const auto& d = surf.data();
      for (int i = 0; i < surf.segment_count(); ++i) {
        const auto [p, q] = surf.segment(i);
        const double len = d.element_measures[i];
        const Vec2 dir = (q - p) / len;
        const Vec2 n = o * d.element_normals[i];
        const double along = std::clamp((z - p).dot(dir), 0.0, len);
        const double dist = (p + along * dir - z).norm();
        Rule1D r;
        if (dist <= tol) {
          r = graded_rule_right(0.0, along, levels, m, s);
          r.append(graded_rule(along, len, levels, m, s));
        } else {
          const int panels = std::clamp(static_cast<int>(std::ceil(len / std::max(dist, 1e-300))), 1, 64);
          for (int k = 0; k < panels; ++k) r.append(gauss_legendre(m, len * k / panels, len * (k + 1) / panels));
        }
        for (std::size_t k = 0; k < r.size(); ++k) out.push_back({p + r.x[k] * dir, n, r.w[k]});
      }
    }
  } else {
    if (const auto* sp = std::get_if<AnalyticSphere>(&surf.representation())) {
      const Vec3 nz = (z - sp->center).normalized();
      const Vec3 t1 = any_orthogonal<3>(nz);
      const Vec3 t2 = nz.cross(t1).normalized();
      const Rule1D beta = composite_rule(0.0, kPi, {}, true, false, levels, m, s);
      const Rule1D phi = uniform_circle_rule(coarse ? std::max(4, cfg.azimuth_nodes / 2) : cfg.azimuth_nodes);
      const double r2 = sp->radius * sp->radius;
      for (std::size_t i = 0; i < beta.size(); ++i)
        for (std::size_t j = 0; j < phi.size(); ++j) {
          const Vec3 u = std::cos(beta.x[i]) * nz +
                         std::sin(beta.x[i]) * (std::cos(phi.x[j]) * t1 + std::sin(phi.x[j]) * t2);
          out.push_back({sp->center + sp->radius * u, o * u, r2 * std::sin(beta.x[i]) * beta.w[i] * phi.w[j]});
        }
    } else {
      const auto& mesh = std::get<TriMesh3D>(surf.representation());
      const auto& d = surf.data();
      const auto touching = surf.elements_near(z, surf.on_surface_tolerance());
      const Rule1D rho = graded_rule(0.0, 1.0, levels, m, s);
      const Rule1D tau = gauss_legendre(m, 0.0, 1.0);
      for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
        const auto& t = mesh.triangles[f];
        const Vec3 &A = mesh.vertices[t[0]], &B = mesh.vertices[t[1]], &C = mesh.vertices[t[2]];
        const Vec3 n = o * d.element_normals[f];
        if (std::binary_search(touching.begin(), touching.end(), static_cast<int>(f))) {
          detail::fan_nodes<3>(z, A, B, n, rho, tau, out);
          detail::fan_nodes<3>(z, B, C, n, rho, tau, out);
          detail::fan_nodes<3>(z, C, A, n, rho, tau, out);
        } else {
          detail::triangle_nodes(z, A, B, C, n, m, 0, out);
        }
      }
    }
  }
  return out;
}

/// PV over S of integrand(y, n(y)) with exclusion |y - z| > eps. The nodes are
/// graded toward z; the value is the full node sum (the eps -> 0 limit of the
/// discrete partial sums, which are reported for eps_k = R_enc 2^-k).
/// integrand returns nullopt where it cannot be evaluated; such nodes are
/// dropped and counted.
template <int N, class Integrand>
PVEstimate surface_pv_integrate(const OrientedSurface<N>& surf, const Vec<N>& z, const FractionalOrder& order,
                                Integrand&& integrand, const PVConfig& cfg) {
  interior_normal(surf, z);
  const double r_enc = surf.enclosing_radius(z);
  auto run = [&](bool coarse, PVDiagnostics& diag) {
    const auto nodes = surface_nodes<N>(surf, z, order.s(), cfg, coarse);
    const std::size_t count = nodes.size();
    std::vector<double> terms(count, 0.0);
    std::vector<char> bad(count, 0);
    parallel_for(count, cfg.exec, [&](std::size_t i) {
      const auto v = integrand(nodes[i].y, nodes[i].normal);
      if (v) terms[i] = nodes[i].w * *v;
      else bad[i] = 1;
    });
    diag.total_nodes = count;
    diag.degenerate_nodes = 0;
    for (char b : bad) diag.degenerate_nodes += b;
    diag.epsilons.clear();
    diag.shell_values.clear();
    std::vector<double> masked(count);
    double eps = r_enc;
    for (int k = 0; k < cfg.shells; ++k) {
      eps *= 0.5;
      for (std::size_t i = 0; i < count; ++i) masked[i] = (nodes[i].y - z).norm() > eps ? terms[i] : 0.0;
      diag.epsilons.push_back(eps);
      diag.shell_values.push_back(ordered_sum(masked));
    }
    std::vector<double> abs_terms(count);
    for (std::size_t i = 0; i < count; ++i) abs_terms[i] = std::abs(terms[i]);
    return std::make_pair(ordered_sum(terms), ordered_sum(abs_terms));
  };
  PVEstimate e;
  PVDiagnostics cd;
  const auto [fine, abs_fine] = run(false, e.diagnostics);
  const auto [coarse, abs_coarse] = run(true, cd);
  (void)abs_coarse;
  auto& d = e.diagnostics;
  if (d.degenerate_nodes > cfg.max_degenerate_fraction * static_cast<double>(d.total_nodes))
    throw ConvergenceError("integrand unresolved at more than 1% of surface nodes");
  e.value = fine;
  d.refinement_change = std::abs(fine - coarse);
  d.extrapolation_correction = d.shell_values.empty() ? 0.0 : std::abs(fine - d.shell_values.back());
  e.error_estimate = std::max({d.refinement_change, 1e-10 * abs_fine, std::numeric_limits<double>::min()});
  if (e.error_estimate > cfg.error_cap) throw ConvergenceError("surface PV error estimate above cap");
  return e;
}

}  // namespace fracsurf
