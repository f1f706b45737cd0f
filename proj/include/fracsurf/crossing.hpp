#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "fracsurf/geometry.hpp"
#include "fracsurf/solid.hpp"

namespace fracsurf {

inline constexpr double kTolTangent = 1e-8;

enum class Degeneracy { TangentHit, EdgeOrVertexHit, EndpointOnSurface, NearParallelUnresolved };

inline const char* to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::TangentHit: return "TangentHit";
    case Degeneracy::EdgeOrVertexHit: return "EdgeOrVertexHit";
    case Degeneracy::EndpointOnSurface: return "EndpointOnSurface";
    case Degeneracy::NearParallelUnresolved: return "NearParallelUnresolved";
  }
  return "?";
}

struct CrossingRecord {
  int count = 0;
  std::optional<Degeneracy> degenerate;
};

struct PairClass {
  enum Kind { Odd, Even, Degenerate };
  Kind kind = Even;
  std::optional<Degeneracy> reason;

  bool odd() const { return kind == Odd; }
  bool degenerate() const { return kind == Degenerate; }
  bool operator==(const PairClass& o) const { return kind == o.kind && reason == o.reason; }
};

/// +1 on A_i(z,1), -1 on A_e(z,1), or a degeneracy reason.
struct SignedIndicator {
  int value = 0;
  std::optional<Degeneracy> reason;

  bool degenerate() const { return reason.has_value(); }
  static SignedIndicator of(int v) { return {v, std::nullopt}; }
  static SignedIndicator bad(Degeneracy d) { return {0, d}; }
};

/// Intersection queries of lines with a surface.
///
/// Free mode counts hits of o + t d for t strictly inside (t0, t1), with the
/// tangent and hit tolerances. Surface mode casts rays from a fixed point z on
/// S: facets or segments containing z are skipped, and for analytic circles,
/// arcs and spheres the second intersection is taken from the exact root
/// t = -2 (z - c) . d, so near-tangent rays are resolved rather than flagged.
template <int N>
class RayCaster {
 public:
  explicit RayCaster(const OrientedSurface<N>& s) : s_(&s), tol_hit_(s.tol_hit()) {}

  RayCaster(const OrientedSurface<N>& s, const Vec<N>& z) : s_(&s), tol_hit_(s.tol_hit()), z_(z) {
    skip_ = s.elements_near(z, tol_hit_);
  }

  const OrientedSurface<N>& surface() const { return *s_; }

  /// Free-mode hit parameters in (t0, t1), sorted. |d| = 1.
  std::optional<Degeneracy> cast(const Vec<N>& o, const Vec<N>& d, double t0, double t1,
                                 std::vector<double>& ts) const {
    ts.clear();
    std::optional<Degeneracy> bad;
    run(o, d, t0, t1, false, ts, bad);
    if (!bad) std::sort(ts.begin(), ts.end());
    return bad;
  }

  /// Surface-mode hit parameters in (0, t1) along z + t d, sorted. |d| = 1.
  std::optional<Degeneracy> cast_from_surface(const Vec<N>& d, double t1, std::vector<double>& ts) const {
    ts.clear();
    std::optional<Degeneracy> bad;
    run(*z_, d, 0.0, t1, true, ts, bad);
    if (!bad) std::sort(ts.begin(), ts.end());
    return bad;
  }

  bool surface_mode() const { return z_.has_value(); }
  const Vec<N>& origin() const { return *z_; }

 private:
  void run(const Vec<N>& o, const Vec<N>& d, double t0, double t1, bool from_surface, std::vector<double>& ts,
           std::optional<Degeneracy>& bad) const {
    const auto& rep = s_->representation();
    if constexpr (N == 2) {
      if (const auto* c = std::get_if<AnalyticCircle>(&rep)) {
        round(c->center, c->radius, nullptr, o, d, t0, t1, from_surface, ts, bad);
      } else if (const auto* a = std::get_if<AnalyticArc>(&rep)) {
        round(a->center, a->radius, a, o, d, t0, t1, from_surface, ts, bad);
      } else {
        polyline(o, d, t0, t1, from_surface, ts, bad);
      }
    } else {
      if (const auto* sp = std::get_if<AnalyticSphere>(&rep)) {
        round(sp->center, sp->radius, nullptr, o, d, t0, t1, from_surface, ts, bad);
      } else {
        mesh(o, d, t0, t1, from_surface, ts, bad);
      }
    }
  }

  void flag(std::optional<Degeneracy>& bad, Degeneracy why) const {
    if (!bad) bad = why;
  }

  // Records a hit at t, checking proximity to the segment ends.
  void accept(double t, double t0, double t1, bool from_surface, std::vector<double>& ts,
              std::optional<Degeneracy>& bad) const {
    if (from_surface) {
      if (t <= tol_hit_) {
        if (t > -tol_hit_) flag(bad, Degeneracy::EdgeOrVertexHit);
        return;
      }
    } else if (std::abs(t - t0) <= tol_hit_) {
      flag(bad, Degeneracy::EndpointOnSurface);
      return;
    }
    if (std::abs(t1 - t) <= tol_hit_) {
      flag(bad, Degeneracy::EndpointOnSurface);
      return;
    }
    if (t > t0 && t < t1) ts.push_back(t);
  }

  bool arc_contains(const AnalyticArc* arc, const Vec<N>& p, std::optional<Degeneracy>& bad) const {
    if constexpr (N == 2) {
      if (!arc) return true;
      const Vec2 e0 = OrientedSurface<2>::arc_point(*arc, arc->angle_start);
      const Vec2 e1 = OrientedSurface<2>::arc_point(*arc, arc->angle_end);
      if ((p - e0).norm() <= tol_hit_ || (p - e1).norm() <= tol_hit_) {
        flag(bad, Degeneracy::EdgeOrVertexHit);
        return false;
      }
      const double off = detail::ccw_offset(arc->angle_start, detail::angle_of(p - arc->center));
      return off <= arc->angle_end - arc->angle_start;
    } else {
      (void)p;
      (void)bad;
      return true;
    }
  }

  // Circle, arc or sphere.
  void round(const Vec<N>& c, double r, const AnalyticArc* arc, const Vec<N>& o, const Vec<N>& d, double t0,
             double t1, bool from_surface, std::vector<double>& ts, std::optional<Degeneracy>& bad) const {
    const Vec<N> oc = o - c;
    const double b = oc.dot(d);
    if (from_surface) {
      const double t = -2.0 * b;
      if (t == 0.0) {
        flag(bad, Degeneracy::TangentHit);
        return;
      }
      if (t > 0.0 && arc_contains(arc, o + t * d, bad)) accept(t, t0, t1, true, ts, bad);
      return;
    }
    const double cc = oc.squaredNorm() - r * r;
    const double disc = b * b - cc;
    const double line_dist = std::sqrt(std::max(0.0, oc.squaredNorm() - b * b));
    if (disc <= 0.0 || std::sqrt(disc) / r < kTolTangent) {
      if (std::abs(line_dist - r) <= tol_hit_ || disc > 0.0) {
        const double t = -b;
        if (t > t0 - tol_hit_ && t < t1 + tol_hit_ && arc_contains(arc, o + t * d, bad))
          flag(bad, Degeneracy::TangentHit);
      }
      return;
    }
    const double sq = std::sqrt(disc);
    const double q = -(b + std::copysign(sq, b));
    const double ta = q;
    const double tb = q != 0.0 ? cc / q : sq;
    for (double t : {ta, tb}) {
      if (t < t0 - tol_hit_ || t > t1 + tol_hit_) continue;
      if (arc_contains(arc, o + t * d, bad)) accept(t, t0, t1, false, ts, bad);
    }
  }

  static double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

  void polyline(const Vec<N>& o, const Vec<N>& d, double t0, double t1, bool from_surface, std::vector<double>& ts,
                std::optional<Degeneracy>& bad) const {
    if constexpr (N == 2) {
      const int segs = s_->segment_count();
      for (int i = 0; i < segs; ++i) {
        if (from_surface && std::binary_search(skip_.begin(), skip_.end(), i)) continue;
        const auto [a, b] = s_->segment(i);
        const Vec2 e = b - a;
        const double len = e.norm();
        const double denom = cross2(d, e);
        if (std::abs(denom) / len < kTolTangent) {
          const double da = cross2(d, a - o), db = cross2(d, b - o);
          if (da * db <= 0.0 || std::min(std::abs(da), std::abs(db)) <= tol_hit_) {
            const double ta = (a - o).dot(d), tb = (b - o).dot(d);
            if (std::max(ta, tb) > t0 && std::min(ta, tb) < t1) flag(bad, Degeneracy::TangentHit);
          }
          continue;
        }
        const Vec2 ao = a - o;
        const double t = cross2(ao, e) / denom;
        const double w = cross2(ao, d) / denom;
        const double da = w * len, db = (1.0 - w) * len;
        if (da < -tol_hit_ || db < -tol_hit_) continue;
        if (t < t0 - tol_hit_ || t > t1 + tol_hit_) continue;
        if (std::abs(da) <= tol_hit_ || std::abs(db) <= tol_hit_) {
          if (t > t0 && t < t1) flag(bad, Degeneracy::EdgeOrVertexHit);
          continue;
        }
        accept(t, t0, t1, from_surface, ts, bad);
      }
    } else {
      (void)o, (void)d, (void)t0, (void)t1, (void)from_surface, (void)ts, (void)bad;
    }
  }

  void mesh(const Vec<N>& o, const Vec<N>& d, double t0, double t1, bool from_surface, std::vector<double>& ts,
            std::optional<Degeneracy>& bad) const {
    if constexpr (N == 3) {
      const auto& m = std::get<TriMesh3D>(s_->representation());
      const auto& data = s_->data();
      // Clip the query to a ball around the box center for the BVH.
      const Vec3 c = s_->bbox_center();
      const double reach = (o - c).norm() + data.diameter;
      const double q0 = std::max(t0, -reach), q1 = std::min(t1, reach);
      if (!(q1 >= q0)) return;
      data.bvh.ray_query(o, d, q0 - tol_hit_, q1 + tol_hit_, [&](int f) {
        if (from_surface && std::binary_search(skip_.begin(), skip_.end(), f)) return;
        const auto& tri = m.triangles[f];
        const Vec3& A = m.vertices[tri[0]];
        const Vec3& B = m.vertices[tri[1]];
        const Vec3& C = m.vertices[tri[2]];
        const Vec3 e1 = B - A, e2 = C - A;
        const Vec3 p = d.cross(e2);
        const double det = e1.dot(p);
        const double twice_area = 2.0 * data.element_measures[f];
        if (det == 0.0) {
          if (std::abs(data.element_normals[f].dot(o - A)) <= tol_hit_) flag(bad, Degeneracy::NearParallelUnresolved);
          return;
        }
        const double inv = 1.0 / det;
        const Vec3 sv = o - A;
        const double l1 = sv.dot(p) * inv;
        const Vec3 qv = sv.cross(e1);
        const double l2 = d.dot(qv) * inv;
        const double t = e2.dot(qv) * inv;
        const double l0 = 1.0 - l1 - l2;
        // Distance of the hit to the edge opposite each vertex.
        const double h0 = l0 * twice_area / (C - B).norm();
        const double h1 = l1 * twice_area / (C - A).norm();
        const double h2 = l2 * twice_area / (B - A).norm();
        if (h0 < -tol_hit_ || h1 < -tol_hit_ || h2 < -tol_hit_) return;
        if (t < t0 - tol_hit_ || t > t1 + tol_hit_) return;
        if (std::abs(det) / twice_area < kTolTangent) {
          flag(bad, Degeneracy::TangentHit);
          return;
        }
        if (h0 <= tol_hit_ || h1 <= tol_hit_ || h2 <= tol_hit_) {
          if (t > t0 && t < t1) flag(bad, Degeneracy::EdgeOrVertexHit);
          return;
        }
        accept(t, t0, t1, from_surface, ts, bad);
      });
    } else {
      (void)o, (void)d, (void)t0, (void)t1, (void)from_surface, (void)ts, (void)bad;
    }
  }

  const OrientedSurface<N>* s_;
  double tol_hit_;
  std::optional<Vec<N>> z_;
  std::vector<int> skip_;
};

// ---------------------------------------------------------------------------
// Pointwise operations
// ---------------------------------------------------------------------------

template <int N>
CrossingRecord segment_crossings(const OrientedSurface<N>& s, const Vec<N>& x, const Vec<N>& y) {
  const Vec<N> diff = y - x;
  const double len = diff.norm();
  if (!(len > 0.0)) throw ValidationError("segment endpoints coincide");
  std::vector<double> ts;
  const auto bad = RayCaster<N>(s).cast(x, diff / len, 0.0, len, ts);
  CrossingRecord rec;
  rec.degenerate = bad;
  rec.count = bad ? 0 : static_cast<int>(ts.size());
  return rec;
}

namespace detail {
inline PairClass to_class(const CrossingRecord& r) {
  if (r.degenerate) return {PairClass::Degenerate, r.degenerate};
  return {(r.count % 2) ? PairClass::Odd : PairClass::Even, std::nullopt};
}
}  // namespace detail

/// Symmetric by construction: the segment is always traversed from the
/// lexicographically smaller endpoint.
template <int N>
PairClass classify_pair(const OrientedSurface<N>& s, const Vec<N>& x, const Vec<N>& y) {
  const bool swap = std::lexicographical_compare(y.data(), y.data() + N, x.data(), x.data() + N);
  return detail::to_class(swap ? segment_crossings(s, y, x) : segment_crossings(s, x, y));
}

/// Oriented normal at an interior point z (not within tol_hit of the boundary).
template <int N>
Vec<N> interior_normal(const OrientedSurface<N>& s, const Vec<N>& z) {
  const Vec<N> n = s.normal_at(z);
  if (s.distance_to_boundary(z) <= s.tol_hit()) throw ValidationError("point lies on the surface boundary");
  return n;
}

/// hat_chi with a prepared surface-mode caster and the oriented normal at its origin.
template <int N>
SignedIndicator hat_chi_with(const RayCaster<N>& caster, const Vec<N>& nz, const Vec<N>& y,
                             std::vector<double>& scratch) {
  const Vec<N>& z = caster.origin();
  const Vec<N> diff = z - y;
  const double len = diff.norm();
  if (!(len > 0.0)) return SignedIndicator::bad(Degeneracy::EndpointOnSurface);
  const double side = diff.dot(nz);
  if (std::abs(side) < kTolTangent * len) return SignedIndicator::bad(Degeneracy::TangentHit);
  const auto bad = caster.cast_from_surface(-diff / len, len, scratch);
  if (bad) return SignedIndicator::bad(*bad);
  const bool even = scratch.size() % 2 == 0;
  return SignedIndicator::of((even == (side > 0.0)) ? 1 : -1);
}

template <int N>
SignedIndicator hat_chi(const OrientedSurface<N>& s, const Vec<N>& z, const Vec<N>& y) {
  const Vec<N> nz = interior_normal(s, z);
  const RayCaster<N> caster(s, z);
  std::vector<double> scratch;
  return hat_chi_with(caster, nz, y, scratch);
}

/// Membership oracle for primitive solids: +1 inside, -1 outside.
template <int N>
int tilde_chi(const SolidSet<N>& e, const Vec<N>& y) {
  const double sd = e.signed_distance(y);
  if (std::abs(sd) <= 1e-9 * e.scale()) throw ValidationError("point lies on the solid boundary");
  return sd < 0.0 ? 1 : -1;
}

/// Value of hat_chi(S, z, z + r u) for every r beyond the enclosing radius.
/// Directions with |u . n(z)| < kTolTangent are Degenerate (TangentHit).
template <int N>
SignedIndicator ray_far_sign_with(const RayCaster<N>& caster, const Vec<N>& nz, const Vec<N>& u,
                                  std::vector<double>& scratch) {
  const double un = u.dot(nz);
  if (std::abs(un) < kTolTangent) return SignedIndicator::bad(Degeneracy::TangentHit);
  const auto bad = caster.cast_from_surface(u, kInf, scratch);
  if (bad) return SignedIndicator::bad(*bad);
  const bool even = scratch.size() % 2 == 0;
  // (z - y) . n = -r u . n
  return SignedIndicator::of((even == (un < 0.0)) ? 1 : -1);
}

template <int N>
SignedIndicator ray_far_sign(const OrientedSurface<N>& s, const Vec<N>& z, const Vec<N>& u) {
  const Vec<N> nz = interior_normal(s, z);
  const RayCaster<N> caster(s, z);
  std::vector<double> scratch;
  return ray_far_sign_with(caster, nz, u.normalized(), scratch);
}

struct NormalSign {
  int sigma = 0;
  std::optional<Degeneracy> reason;
  bool degenerate() const { return reason.has_value(); }
};

inline constexpr double kProbeScale = 1e-4;

/// Sign sigma with n_{A_i}(y) = sigma n(y), from probes y +- delta n(y).
template <int N>
NormalSign interior_normal_sign_with(const RayCaster<N>& caster, const Vec<N>& nz, const Vec<N>& y,
                                     const Vec<N>& ny, double local_size, std::vector<double>& scratch) {
  double delta = kProbeScale * local_size;
  std::optional<Degeneracy> last = Degeneracy::NearParallelUnresolved;
  for (int attempt = 0; attempt < 4; ++attempt, delta *= 0.1) {
    const auto plus = hat_chi_with(caster, nz, Vec<N>(y + delta * ny), scratch);
    const auto minus = hat_chi_with(caster, nz, Vec<N>(y - delta * ny), scratch);
    if (plus.degenerate()) {
      last = plus.reason;
      continue;
    }
    if (minus.degenerate()) {
      last = minus.reason;
      continue;
    }
    if (plus.value == -minus.value) return {-plus.value, std::nullopt};
    last = Degeneracy::NearParallelUnresolved;
  }
  return {0, last};
}

template <int N>
NormalSign interior_normal_sign(const OrientedSurface<N>& s, const Vec<N>& z, const Vec<N>& y) {
  const Vec<N> nz = interior_normal(s, z);
  if ((y - z).norm() <= s.tol_hit()) throw ValidationError("probe point coincides with z");
  const Vec<N> ny = interior_normal(s, y);
  const RayCaster<N> caster(s, z);
  std::vector<double> scratch;
  return interior_normal_sign_with(caster, nz, y, ny, s.local_size(y), scratch);
}

}  // namespace fracsurf
