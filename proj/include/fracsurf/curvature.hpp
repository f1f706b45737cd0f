#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "fracsurf/functionals.hpp"
#include "fracsurf/pv.hpp"
#include "fracsurf/surface_pv.hpp"

namespace fracsurf {

enum class CurvatureForm { Volume, Flux, Directional, DirectionalAverage };

inline const char* to_string(CurvatureForm f) {
  switch (f) {
    case CurvatureForm::Volume: return "Volume";
    case CurvatureForm::Flux: return "Flux";
    case CurvatureForm::Directional: return "Directional";
    case CurvatureForm::DirectionalAverage: return "DirectionalAverage";
  }
  return "?";
}

template <int N>
struct CurvatureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  CurvatureForm form = CurvatureForm::Volume;
  Vec<N> z;
  double s = 0.0;
  PVDiagnostics diagnostics;
};

struct CurvatureConfig {
  PVConfig pv;
  double boundary_fraction = 0.05;  // of the enclosing diameter
  int n_directions = 16;            // tangent directions for the n = 3 average
};

namespace detail {

/// Oriented normal at z after checking the restricted zone near the boundary.
template <int N>
Vec<N> curvature_normal(const OrientedSurface<N>& surf, const Vec<N>& z, const CurvatureConfig& cfg) {
  const Vec<N> nz = interior_normal(surf, z);
  if (!surf.closed() && surf.distance_to_boundary(z) < cfg.boundary_fraction * surf.enclosing_diameter())
    throw ValidationError("evaluation point lies in the restricted zone near the surface boundary");
  return nz;
}

/// Points where the sign field along rays from z may jump: polyline vertices
/// and boundary points.
inline std::vector<Vec2> kink_points(const OrientedSurface<2>& surf) {
  std::vector<Vec2> pts = surf.boundary_points();
  if (const auto* p = std::get_if<Polyline2D>(&surf.representation()))
    pts.insert(pts.end(), p->vertices.begin(), p->vertices.end());
  return pts;
}

/// Angles psi in (0, pi) of the pairs (u, -u) aimed at kink points.
inline std::vector<double> volume_breaks(const OrientedSurface<2>& surf, const Vec2& z, const Vec2& n) {
  const Vec2 t(-n.y(), n.x());
  std::vector<double> out;
  for (const Vec2& p : kink_points(surf)) {
    const Vec2 d = p - z;
    if (d.norm() <= surf.tol_hit()) continue;
    double psi = std::atan2(d.dot(n), d.dot(t));
    if (psi <= 0.0) psi += kPi;
    if (psi > 0.0 && psi < kPi) out.push_back(psi);
  }
  return out;
}

/// Angles theta in (0, pi/2) of the half-plane rays aimed at kink points.
inline std::vector<double> directional_breaks(const OrientedSurface<2>& surf, const Vec2& z, const Vec2& n,
                                              const Vec2& e) {
  std::vector<double> out;
  for (const Vec2& p : kink_points(surf)) {
    const Vec2 d = p - z;
    if (d.norm() <= surf.tol_hit() || d.dot(e) <= 0.0) continue;
    const double th = std::abs(std::atan2(d.dot(n), d.dot(e)));
    if (th > 0.0 && th < 0.5 * kPi) out.push_back(th);
  }
  return out;
}

template <int N>
PVEstimate pair_estimate(const OrientedSurface<N>& surf, const Vec<N>& z, const Vec<N>& nz, double s,
                         const std::function<std::vector<RayPair<N>>(bool)>& pairs, const PVConfig& cfg) {
  const RayCaster<N> caster(surf, z);
  const double r_enc = surf.enclosing_radius(z);
  const PairSums fine = ray_pair_sums(caster, nz, pairs(false), s, r_enc, cfg.shells, cfg.exec);
  const PairSums coarse = ray_pair_sums(caster, nz, pairs(true), s, r_enc, cfg.shells, cfg.exec);
  return pv_from_pairs(fine, coarse, r_enc, cfg);
}

}  // namespace detail

/// H_s(z) = (1 / omega_(n-2)) PV int hat_chi(z, y) |z - y|^(-n-2s) dy, with
/// the radial integrals along rays from z done exactly between crossings.
template <int N>
CurvatureResult<N> mean_curvature_volume(const OrientedSurface<N>& surf, const Vec<N>& z,
                                         const FractionalOrder& order, const CurvatureConfig& cfg = {}) {
  const Vec<N> nz = detail::curvature_normal(surf, z, cfg);
  const Vec<N> ng = surf.geometric_normal_at(z);
  const double s = order.s();
  std::vector<double> breaks;
  if constexpr (N == 2) breaks = detail::volume_breaks(surf, z, ng);
  const PVEstimate e = detail::pair_estimate<N>(
      surf, z, nz, s, [&](bool coarse) { return volume_pairs<N>(ng, s, breaks, cfg.pv, coarse); }, cfg.pv);
  const double omega = unit_sphere_measure(N - 2);
  return {e.value / omega, e.error_estimate / omega, CurvatureForm::Volume, z, s, e.diagnostics};
}

/// Flux form: (1 / (s omega_(n-2))) PV int_S |z - y|^(-n-2s) (z - y) . n_Ai(y) dy,
/// with n_Ai = sigma n and sigma from probes on both sides of S.
template <int N>
CurvatureResult<N> mean_curvature_flux(const OrientedSurface<N>& surf, const Vec<N>& z,
                                       const FractionalOrder& order, const CurvatureConfig& cfg = {}) {
  const Vec<N> nz = detail::curvature_normal(surf, z, cfg);
  const double s = order.s();
  const double expo = -(N + 2.0 * s);
  const RayCaster<N> caster(surf, z);
  auto integrand = [&](const Vec<N>& y, const Vec<N>& ny) -> std::optional<double> {
    const Vec<N> d = z - y;
    const double r = d.norm();
    if (!(r > 0.0)) return std::nullopt;
    const double proj = d.dot(ny);
    if (std::abs(proj) <= 1e-13 * r) return 0.0;
    std::vector<double> scratch;
    const NormalSign sg = interior_normal_sign_with(caster, nz, y, ny, surf.local_size(y), scratch);
    if (sg.degenerate()) return std::nullopt;
    return sg.sigma * proj * std::pow(r, expo);
  };
  const PVEstimate e = surface_pv_integrate(surf, z, order, integrand, cfg.pv);
  const double scale = s * unit_sphere_measure(N - 2);
  return {e.value / scale, e.error_estimate / scale, CurvatureForm::Flux, z, s, e.diagnostics};
}

/// K_(s,e)(z): PV over the half-plane through z spanned by the tangent e and the
/// normal, with weight |y' - z|^(n-2) (y' the projection onto the e-line).
template <int N>
CurvatureResult<N> directional_curvature(const OrientedSurface<N>& surf, const Vec<N>& z, const Vec<N>& e,
                                         const FractionalOrder& order, const CurvatureConfig& cfg = {}) {
  const Vec<N> nz = detail::curvature_normal(surf, z, cfg);
  const Vec<N> ng = surf.geometric_normal_at(z);
  if (std::abs(e.norm() - 1.0) > 1e-9 || std::abs(e.dot(ng)) > 1e-9)
    throw ValidationError("direction must be a unit tangent vector at z");
  const double s = order.s();
  std::vector<double> breaks;
  if constexpr (N == 2) breaks = detail::directional_breaks(surf, z, ng, e);
  const PVEstimate est = detail::pair_estimate<N>(
      surf, z, nz, s, [&](bool coarse) { return directional_pairs<N>(ng, e, s, breaks, cfg.pv, coarse); }, cfg.pv);
  return {est.value, est.error_estimate, CurvatureForm::Directional, z, s, est.diagnostics};
}

/// H_s as the average of K_(s,e) over unit tangent directions: {e, -e} in the
/// plane, n_directions equally spaced directions on the tangent circle in space.
template <int N>
CurvatureResult<N> mean_from_directional(const OrientedSurface<N>& surf, const Vec<N>& z,
                                         const FractionalOrder& order, const CurvatureConfig& cfg = {}) {
  const auto basis = surf.tangent_basis_at(z);
  std::vector<Vec<N>> dirs;
  if constexpr (N == 2) {
    dirs = {basis[0], -basis[0]};
  } else {
    if (cfg.n_directions < 8 || cfg.n_directions % 2 != 0)
      throw ValidationError("n_directions must be an even number of at least 8");
    for (int j = 0; j < cfg.n_directions; ++j) {
      const double a = 2.0 * kPi * (j + 0.5) / cfg.n_directions;
      dirs.push_back(std::cos(a) * basis[0] + std::sin(a) * basis[1]);
    }
  }
  std::vector<double> vals, errs;
  for (const auto& e : dirs) {
    const auto k = directional_curvature(surf, z, e, order, cfg);
    vals.push_back(k.value);
    errs.push_back(k.error_estimate);
  }
  const double m = static_cast<double>(dirs.size());
  CurvatureResult<N> r;
  r.value = ordered_sum(vals) / m;
  r.error_estimate = ordered_sum(errs) / m;
  if constexpr (N == 3) {
    // Change against the rule on every other direction.
    std::vector<double> half;
    for (std::size_t j = 0; j < vals.size(); j += 2) half.push_back(vals[j]);
    r.error_estimate += std::abs(r.value - ordered_sum(half) / static_cast<double>(half.size()));
  }
  r.form = CurvatureForm::DirectionalAverage;
  r.z = z;
  r.s = order.s();
  return r;
}

/// Local curvature of an analytic primitive in the repository convention: a
/// convex curve or sphere with outward normal has negative curvature, matching
/// the sign of H_s. Equal for every tangent direction.
template <int N>
double classical_curvature(const OrientedSurface<N>& surf, const Vec<N>& z,
                           const std::optional<Vec<N>>& e = std::nullopt) {
  (void)e;
  double radius = 0.0;
  if constexpr (N == 2) {
    if (const auto* c = std::get_if<AnalyticCircle>(&surf.representation())) radius = c->radius;
    else if (const auto* a = std::get_if<AnalyticArc>(&surf.representation())) radius = a->radius;
  } else {
    if (const auto* sp = std::get_if<AnalyticSphere>(&surf.representation())) radius = sp->radius;
  }
  if (radius == 0.0) throw ValidationError("classical curvature needs an analytic circle, arc or sphere");
  surf.normal_at(z);
  return -static_cast<double>(surf.orientation()) / radius;
}

enum class LimitKind { Mean, Directional };

/// (1 - 2s) H_s or (1 - 2s) K_(s,e) over the grid, extrapolated to s = 1/2.
template <int N>
SweepResult local_limit_estimate(const OrientedSurface<N>& surf, const Vec<N>& z, const std::vector<double>& grid,
                                 LimitKind which, const std::optional<Vec<N>>& e = std::nullopt,
                                 const CurvatureConfig& cfg = {}) {
  if (which == LimitKind::Directional && !e) throw ValidationError("directional limit needs a direction");
  return scaled_limit_sweep(
      [&](double s) {
        const FractionalOrder order(s);
        const auto r = which == LimitKind::Mean ? mean_curvature_volume(surf, z, order, cfg)
                                                : directional_curvature(surf, z, *e, order, cfg);
        return std::make_pair(r.value, r.error_estimate);
      },
      grid);
}

struct StationarityResult {
  double residual = 0.0;  // max |H_s|
  std::vector<double> values;
  std::vector<double> errors;
};

/// First-variation residual: H_s at each sample point, the maximum of |H_s|.
template <int N>
StationarityResult stationarity_residual(const OrientedSurface<N>& surf, const FractionalOrder& order,
                                         const std::vector<Vec<N>>& points, const CurvatureConfig& cfg = {}) {
  if (points.empty()) throw ValidationError("no sample points");
  StationarityResult r;
  for (const auto& z : points) {
    const auto h = mean_curvature_volume(surf, z, order, cfg);
    r.values.push_back(h.value);
    r.errors.push_back(h.error_estimate);
    r.residual = std::max(r.residual, std::abs(h.value));
  }
  return r;
}

}  // namespace fracsurf
