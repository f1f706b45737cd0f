#pragma once

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fracsurf/bvh.hpp"
#include "fracsurf/core.hpp"
#include "fracsurf/execution.hpp"

namespace fracsurf {

// ---------------------------------------------------------------------------
// Representations
// ---------------------------------------------------------------------------

struct AnalyticCircle {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
};

/// Counter-clockwise arc of a circle from angle_start to angle_end.
struct AnalyticArc {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;
  double angle_start = 0.0;
  double angle_end = kPi;
};

/// Segment i joins vertices i and i+1 (and the last to the first if closed).
/// The normal of a segment with direction d is (d.y, -d.x), i.e. outward for a
/// counter-clockwise closed polygon.
struct Polyline2D {
  std::vector<Vec2> vertices;
  bool closed = false;
};

struct AnalyticSphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

/// Facet normals follow the right-hand rule on the index winding.
struct TriMesh3D {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
};

template <int N>
struct Representation;
template <>
struct Representation<2> {
  using type = std::variant<AnalyticCircle, AnalyticArc, Polyline2D>;
};
template <>
struct Representation<3> {
  using type = std::variant<AnalyticSphere, TriMesh3D>;
};

/// A point drawn from the surface measure together with its oriented normal.
template <int N>
struct SurfaceSample {
  Vec<N> point;
  Vec<N> normal;
};

// ---------------------------------------------------------------------------
// Small geometric helpers
// ---------------------------------------------------------------------------

namespace detail {

/// Angle of v in [0, 2 pi).
inline double angle_of(const Vec2& v) {
  double a = std::atan2(v.y(), v.x());
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

/// Counter-clockwise offset of `angle` from `start`, in [0, 2 pi).
inline double ccw_offset(double start, double angle) {
  double d = std::fmod(angle - start, 2.0 * kPi);
  if (d < 0.0) d += 2.0 * kPi;
  return d;
}

template <int N>
double point_segment_distance(const Vec<N>& p, const Vec<N>& a, const Vec<N>& b) {
  const Vec<N> ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

/// Closest point on triangle abc to p (Ericson, Real-Time Collision Detection 5.1.5).
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// OrientedSurface
// ---------------------------------------------------------------------------

/// Compact oriented hypersurface in R^N (N = 2 or 3), possibly with boundary.
/// Immutable after construction; copies share the geometry.
template <int N>
class OrientedSurface {
  static_assert(N == 2 || N == 3, "only curves in the plane and surfaces in space");

 public:
  using Point = Vec<N>;
  using Rep = typename Representation<N>::type;

  /// Precomputed per-element data. Normals stored here are geometric (as built);
  /// the orientation flag of the owning surface multiplies them.
  struct Data {
    Rep rep;
    // Polyline: per-segment; mesh: per-facet.
    std::vector<Point> element_normals;
    std::vector<double> element_measures;
    std::vector<double> cumulative_measure;
    double measure = 0.0;
    Point bbox_lo = Point::Zero();
    Point bbox_hi = Point::Zero();
    double diameter = 0.0;
    double feature = 0.0;
    std::vector<Point> boundary_points;  // 2D endpoints, 3D boundary vertices
    std::vector<std::array<int, 2>> boundary_edges;  // mesh only
    TriangleBvh bvh;  // mesh only
  };

  explicit OrientedSurface(Rep rep) : data_(std::make_shared<Data>(build(std::move(rep)))) {}

  static constexpr int dimension() { return N; }
  const Rep& representation() const { return data_->rep; }
  const Data& data() const { return *data_; }

  template <class T>
  bool holds() const {
    return std::holds_alternative<T>(data_->rep);
  }

  /// +1 as constructed, -1 after an odd number of flips.
  int orientation() const { return orientation_; }

  /// Same geometry with the normal field reversed.
  OrientedSurface flipped() const {
    OrientedSurface out = *this;
    out.orientation_ = -orientation_;
    return out;
  }

  bool closed() const {
    if constexpr (N == 2) {
      return std::visit(
          [](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, AnalyticCircle>) return true;
            else if constexpr (std::is_same_v<T, AnalyticArc>) return false;
            else return r.closed;
          },
          data_->rep);
    } else {
      return data_->boundary_edges.empty();
    }
  }

  double classical_measure() const { return data_->measure; }

  /// Diameter of the ball around the bounding-box center that contains S.
  double enclosing_diameter() const { return data_->diameter; }

  /// Smallest geometric length scale (radius, segment or edge length).
  double feature_size() const { return data_->feature; }

  /// Hit tolerance used by the crossing tests.
  double tol_hit() const { return 1e-9 * data_->diameter; }

  /// Distance below which a point counts as lying on S.
  double on_surface_tolerance() const { return 1e-9 * data_->diameter; }

  Point bbox_center() const { return 0.5 * (data_->bbox_lo + data_->bbox_hi); }

  /// Radius R with S inside the closed ball B(z, R), inflated by 1e-9 relative.
  double enclosing_radius(const Point& z) const {
    double r = 0.0;
    if constexpr (N == 2) {
      if (const auto* c = std::get_if<AnalyticCircle>(&data_->rep)) {
        r = (z - c->center).norm() + c->radius;
      } else if (const auto* a = std::get_if<AnalyticArc>(&data_->rep)) {
        r = std::max((z - arc_point(*a, a->angle_start)).norm(), (z - arc_point(*a, a->angle_end)).norm());
        const Point away = a->center - z;
        const double dist = away.norm();
        if (dist > 0.0) {
          // Farthest circle point from z lies opposite to z.
          const double far_angle = detail::angle_of(away / dist);
          if (detail::ccw_offset(a->angle_start, far_angle) <= a->angle_end - a->angle_start)
            r = std::max(r, dist + a->radius);
        } else {
          r = a->radius;
        }
      } else {
        for (const auto& v : std::get<Polyline2D>(data_->rep).vertices) r = std::max(r, (v - z).norm());
      }
    } else {
      if (const auto* s = std::get_if<AnalyticSphere>(&data_->rep)) {
        r = (z - s->center).norm() + s->radius;
      } else {
        for (const auto& v : std::get<TriMesh3D>(data_->rep).vertices) r = std::max(r, (v - z).norm());
      }
    }
    return r * (1.0 + 1e-9);
  }

  /// Euclidean distance from p to S.
  double distance_to(const Point& p) const {
    if constexpr (N == 2) {
      if (const auto* c = std::get_if<AnalyticCircle>(&data_->rep)) {
        return std::abs((p - c->center).norm() - c->radius);
      } else if (const auto* a = std::get_if<AnalyticArc>(&data_->rep)) {
        const Point d = p - a->center;
        if (d.norm() > 0.0 && detail::ccw_offset(a->angle_start, detail::angle_of(d)) <=
                                  a->angle_end - a->angle_start)
          return std::abs(d.norm() - a->radius);
        return std::min((p - arc_point(*a, a->angle_start)).norm(), (p - arc_point(*a, a->angle_end)).norm());
      } else {
        const auto& pl = std::get<Polyline2D>(data_->rep);
        double best = kInf;
        for (int i = 0; i < segment_count(); ++i) {
          const auto [a, b] = segment(i);
          best = std::min(best, detail::point_segment_distance<2>(p, a, b));
        }
        (void)pl;
        return best;
      }
    } else {
      if (const auto* s = std::get_if<AnalyticSphere>(&data_->rep)) {
        return std::abs((p - s->center).norm() - s->radius);
      } else {
        const auto& m = std::get<TriMesh3D>(data_->rep);
        double best = kInf;
        for (const auto& t : m.triangles)
          best = std::min(best, (detail::closest_point_on_triangle(p, m.vertices[t[0]], m.vertices[t[1]],
                                                                    m.vertices[t[2]]) - p).norm());
        return best;
      }
    }
  }

  /// Indices of elements (segments or facets) within `tol` of p.
  std::vector<int> elements_near(const Point& p, double tol) const {
    std::vector<int> out;
    if constexpr (N == 2) {
      if (holds<Polyline2D>()) {
        for (int i = 0; i < segment_count(); ++i) {
          const auto [a, b] = segment(i);
          if (detail::point_segment_distance<2>(p, a, b) <= tol) out.push_back(i);
        }
      }
    } else {
      if (holds<TriMesh3D>()) {
        const auto& m = std::get<TriMesh3D>(data_->rep);
        const Vec3 lo = p.array() - tol, hi = p.array() + tol;
        data_->bvh.box_query(lo, hi, [&](int f) {
          const auto& t = m.triangles[f];
          const Vec3 q = detail::closest_point_on_triangle(p, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
          if ((q - p).norm() <= tol) out.push_back(f);
        });
        std::sort(out.begin(), out.end());
      }
    }
    return out;
  }

  /// Geometric (orientation-independent) unit normal at z on S.
  /// Throws ValidationError when z is farther than on_surface_tolerance() from S.
  Point geometric_normal_at(const Point& z) const {
    const double tol = on_surface_tolerance();
    if constexpr (N == 2) {
      if (const auto* c = std::get_if<AnalyticCircle>(&data_->rep)) {
        require_on_surface(z, tol);
        return (z - c->center).normalized();
      } else if (const auto* a = std::get_if<AnalyticArc>(&data_->rep)) {
        require_on_surface(z, tol);
        return (z - a->center).normalized();
      } else {
        const auto near = elements_near(z, tol);
        if (near.empty()) throw ValidationError("point is not on the surface");
        Point n = Point::Zero();
        for (int i : near) n += data_->element_normals[i];
        return n.normalized();
      }
    } else {
      if (const auto* s = std::get_if<AnalyticSphere>(&data_->rep)) {
        require_on_surface(z, tol);
        return (z - s->center).normalized();
      } else {
        const auto near = elements_near(z, tol);
        if (near.empty()) throw ValidationError("point is not on the surface");
        Point n = Point::Zero();
        for (int f : near) n += data_->element_normals[f];
        return n.normalized();
      }
    }
  }

  /// Oriented unit normal at z.
  Point normal_at(const Point& z) const { return static_cast<double>(orientation_) * geometric_normal_at(z); }

  /// Orthonormal tangent vectors at z. They depend on the geometry only, not on
  /// the orientation flag.
  std::array<Point, N - 1> tangent_basis_at(const Point& z) const {
    const Point n = geometric_normal_at(z);
    if constexpr (N == 2) {
      return {Point(-n.y(), n.x())};
    } else {
      const Point t1 = any_orthogonal<3>(n);
      const Point t2 = n.cross(t1).normalized();
      return {t1, t2};
    }
  }

  /// Characteristic element size at z (segment length, sqrt of facet area, radius).
  double local_size(const Point& z) const {
    if constexpr (N == 2) {
      if (const auto* c = std::get_if<AnalyticCircle>(&data_->rep)) return c->radius;
      if (const auto* a = std::get_if<AnalyticArc>(&data_->rep)) return a->radius;
      const auto near = elements_near(z, on_surface_tolerance());
      if (near.empty()) return data_->feature;
      double s = kInf;
      for (int i : near) s = std::min(s, data_->element_measures[i]);
      return s;
    } else {
      if (const auto* s = std::get_if<AnalyticSphere>(&data_->rep)) return s->radius;
      const auto near = elements_near(z, on_surface_tolerance());
      if (near.empty()) return data_->feature;
      double s = kInf;
      for (int f : near) s = std::min(s, std::sqrt(data_->element_measures[f]));
      return s;
    }
  }

  /// Boundary points (2D) or boundary vertices (3D); empty when closed.
  const std::vector<Point>& boundary_points() const { return data_->boundary_points; }

  /// Boundary edges as vertex index pairs (meshes only).
  const std::vector<std::array<int, 2>>& boundary_edges() const { return data_->boundary_edges; }

  /// Boundary edge loops as vertex index sequences (meshes only).
  std::vector<std::vector<int>> boundary_loops() const {
    std::vector<std::vector<int>> loops;
    if constexpr (N == 3) {
      std::map<int, int> next;
      for (const auto& e : data_->boundary_edges) next[e[0]] = e[1];
      while (!next.empty()) {
        std::vector<int> loop;
        int start = next.begin()->first;
        int v = start;
        do {
          loop.push_back(v);
          auto it = next.find(v);
          if (it == next.end()) break;
          const int w = it->second;
          next.erase(it);
          v = w;
        } while (v != start);
        loops.push_back(std::move(loop));
      }
    }
    return loops;
  }

  /// Distance from z to the boundary of S (+inf when closed).
  double distance_to_boundary(const Point& z) const {
    double best = kInf;
    if constexpr (N == 2) {
      for (const auto& b : data_->boundary_points) best = std::min(best, (z - b).norm());
    } else {
      if (holds<TriMesh3D>()) {
        const auto& m = std::get<TriMesh3D>(data_->rep);
        for (const auto& e : data_->boundary_edges)
          best = std::min(best, detail::point_segment_distance<3>(z, m.vertices[e[0]], m.vertices[e[1]]));
      }
    }
    return best;
  }

  /// Draws a point uniformly with respect to the surface measure.
  SurfaceSample<N> sample(Rng& rng) const {
    const double o = static_cast<double>(orientation_);
    if constexpr (N == 2) {
      if (const auto* c = std::get_if<AnalyticCircle>(&data_->rep)) {
        const double phi = 2.0 * kPi * rng.uniform();
        const Point u(std::cos(phi), std::sin(phi));
        return {c->center + c->radius * u, o * u};
      } else if (const auto* a = std::get_if<AnalyticArc>(&data_->rep)) {
        const double phi = a->angle_start + (a->angle_end - a->angle_start) * rng.uniform();
        const Point u(std::cos(phi), std::sin(phi));
        return {a->center + a->radius * u, o * u};
      } else {
        const int i = pick_element(rng.uniform());
        const auto [p, q] = segment(i);
        return {p + rng.uniform() * (q - p), o * data_->element_normals[i]};
      }
    } else {
      if (const auto* s = std::get_if<AnalyticSphere>(&data_->rep)) {
        const double zc = 2.0 * rng.uniform() - 1.0;
        const double phi = 2.0 * kPi * rng.uniform();
        const double rho = std::sqrt(std::max(0.0, 1.0 - zc * zc));
        const Point u(rho * std::cos(phi), rho * std::sin(phi), zc);
        return {s->center + s->radius * u, o * u};
      } else {
        const auto& m = std::get<TriMesh3D>(data_->rep);
        const int f = pick_element(rng.uniform());
        double r1 = std::sqrt(rng.uniform());
        double r2 = rng.uniform();
        const auto& t = m.triangles[f];
        const Point p = (1.0 - r1) * m.vertices[t[0]] + r1 * (1.0 - r2) * m.vertices[t[1]] +
                        r1 * r2 * m.vertices[t[2]];
        return {p, o * data_->element_normals[f]};
      }
    }
  }

  // --- discrete element access -------------------------------------------

  int segment_count() const {
    if constexpr (N == 2) {
      const auto* pl = std::get_if<Polyline2D>(&data_->rep);
      if (!pl) return 0;
      const int v = static_cast<int>(pl->vertices.size());
      return pl->closed ? v : v - 1;
    } else {
      return 0;
    }
  }

  std::pair<Point, Point> segment(int i) const {
    const auto& pl = std::get<Polyline2D>(data_->rep);
    const int v = static_cast<int>(pl.vertices.size());
    return {pl.vertices[i], pl.vertices[(i + 1) % v]};
  }

  static Vec2 arc_point(const AnalyticArc& a, double angle) {
    return a.center + a.radius * Vec2(std::cos(angle), std::sin(angle));
  }

 private:
  void require_on_surface(const Point& z, double tol) const {
    if (distance_to(z) > tol) throw ValidationError("point is not on the surface");
  }

  int pick_element(double u) const {
    const auto& cum = data_->cumulative_measure;
    const double target = u * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    if (it == cum.end()) --it;
    return static_cast<int>(it - cum.begin());
  }

  static Data build(Rep rep) {
    Data d;
    d.rep = std::move(rep);
    if constexpr (N == 2) {
      build2(d);
    } else {
      build3(d);
    }
    // Bounding ball around the box center.
    return d;
  }

  static void finish_bounds(Data& d, const std::vector<Point>& pts) {
    Point lo = Point::Constant(kInf), hi = Point::Constant(-kInf);
    for (const auto& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    d.bbox_lo = lo;
    d.bbox_hi = hi;
    const Point c = 0.5 * (lo + hi);
    double r = 0.0;
    for (const auto& p : pts) r = std::max(r, (p - c).norm());
    d.diameter = 2.0 * r;
  }

  static void build2(Data& d) {
    if (auto* c = std::get_if<AnalyticCircle>(&d.rep)) {
      if (!(c->radius > 0.0) || !std::isfinite(c->radius)) throw ValidationError("circle radius must be positive");
      d.measure = 2.0 * kPi * c->radius;
      d.bbox_lo = c->center.array() - c->radius;
      d.bbox_hi = c->center.array() + c->radius;
      d.diameter = 2.0 * c->radius;
      d.feature = c->radius;
    } else if (auto* a = std::get_if<AnalyticArc>(&d.rep)) {
      if (!(a->radius > 0.0) || !std::isfinite(a->radius)) throw ValidationError("arc radius must be positive");
      const double span = a->angle_end - a->angle_start;
      if (!(span > 0.0)) throw ValidationError("arc angular span must be positive");
      if (span >= 2.0 * kPi) throw ValidationError("arc spans the full circle; use a closed circle instead");
      d.measure = a->radius * span;
      std::vector<Point> pts;
      for (int k = 0; k <= 256; ++k) pts.push_back(arc_point(*a, a->angle_start + span * k / 256.0));
      finish_bounds(d, pts);
      d.diameter = span >= kPi ? 2.0 * a->radius : std::max(d.diameter, 2.0 * a->radius * std::sin(0.5 * span));
      d.feature = std::min(a->radius, d.measure);
      d.boundary_points = {arc_point(*a, a->angle_start), arc_point(*a, a->angle_end)};
    } else {
      auto& pl = std::get<Polyline2D>(d.rep);
      const int v = static_cast<int>(pl.vertices.size());
      if (v < 2 || (pl.closed && v < 3)) throw ValidationError("polyline needs at least 2 vertices (3 if closed)");
      const int segs = pl.closed ? v : v - 1;
      d.feature = kInf;
      for (int i = 0; i < segs; ++i) {
        const Vec2 p = pl.vertices[i], q = pl.vertices[(i + 1) % v];
        const Vec2 dir = q - p;
        const double len = dir.norm();
        if (!(len > 0.0)) throw ValidationError("polyline has a zero-length segment at vertex " + std::to_string(i));
        d.element_normals.push_back(Vec2(dir.y(), -dir.x()) / len);
        d.element_measures.push_back(len);
        d.measure += len;
        d.cumulative_measure.push_back(d.measure);
        d.feature = std::min(d.feature, len);
      }
      finish_bounds(d, pl.vertices);
      if (!pl.closed) d.boundary_points = {pl.vertices.front(), pl.vertices.back()};
    }
  }

  static void build3(Data& d) {
    if (auto* s = std::get_if<AnalyticSphere>(&d.rep)) {
      if (!(s->radius > 0.0) || !std::isfinite(s->radius)) throw ValidationError("sphere radius must be positive");
      d.measure = 4.0 * kPi * s->radius * s->radius;
      d.bbox_lo = s->center.array() - s->radius;
      d.bbox_hi = s->center.array() + s->radius;
      d.diameter = 2.0 * s->radius;
      d.feature = s->radius;
      return;
    }
    auto& m = std::get<TriMesh3D>(d.rep);
    const int nv = static_cast<int>(m.vertices.size());
    if (m.triangles.empty()) throw ValidationError("mesh has no triangles");
    // Directed edge -> owning triangle. A repeated directed edge means two
    // neighbours traverse the shared edge the same way.
    std::map<std::pair<int, int>, int> directed;
    std::map<std::pair<int, int>, int> undirected;
    for (std::size_t f = 0; f < m.triangles.size(); ++f) {
      const auto& t = m.triangles[f];
      for (int k = 0; k < 3; ++k) {
        if (t[k] < 0 || t[k] >= nv) throw ValidationError("triangle " + std::to_string(f) + " has an invalid vertex index");
      }
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
        throw ValidationError("triangle " + std::to_string(f) + " repeats a vertex");
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        if (!directed.emplace(std::make_pair(a, b), static_cast<int>(f)).second)
          throw ValidationError("inconsistent winding: edge (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                                ") is traversed in the same direction by two triangles");
        if (++undirected[std::minmax(a, b)] > 2)
          throw ValidationError("non-manifold edge (" + std::to_string(std::min(a, b) + 1) + "," +
                                std::to_string(std::max(a, b) + 1) + ") has more than two triangles");
      }
      const Vec3 cr = (m.vertices[t[1]] - m.vertices[t[0]]).cross(m.vertices[t[2]] - m.vertices[t[0]]);
      const double area = 0.5 * cr.norm();
      if (!(area > 0.0)) throw ValidationError("triangle " + std::to_string(f) + " is degenerate");
      d.element_normals.push_back(cr.normalized());
      d.element_measures.push_back(area);
      d.measure += area;
      d.cumulative_measure.push_back(d.measure);
    }
    d.feature = kInf;
    for (const auto& [edge, count] : undirected) {
      d.feature = std::min(d.feature, (m.vertices[edge.first] - m.vertices[edge.second]).norm());
      (void)count;
    }
    for (const auto& [edge, f] : directed) {
      if (undirected[std::minmax(edge.first, edge.second)] == 1) d.boundary_edges.push_back({edge.first, edge.second});
      (void)f;
    }
    std::vector<char> on_boundary(nv, 0);
    for (const auto& e : d.boundary_edges) on_boundary[e[0]] = on_boundary[e[1]] = 1;
    for (int i = 0; i < nv; ++i)
      if (on_boundary[i]) d.boundary_points.push_back(m.vertices[i]);
    finish_bounds(d, m.vertices);
    d.bvh = TriangleBvh(m.vertices, m.triangles, 1e-6 * d.diameter);
  }

  std::shared_ptr<const Data> data_;
  int orientation_ = 1;
};

using Curve2 = OrientedSurface<2>;
using Surface3 = OrientedSurface<3>;

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline Curve2 make_circle(const Vec2& center, double radius) {
  return Curve2(AnalyticCircle{center, radius});
}

inline Curve2 make_arc(const Vec2& center, double radius, double angle_start, double angle_end) {
  return Curve2(AnalyticArc{center, radius, angle_start, angle_end});
}

inline Curve2 make_polyline(std::vector<Vec2> vertices, bool closed) {
  return Curve2(Polyline2D{std::move(vertices), closed});
}

inline Surface3 make_sphere(const Vec3& center, double radius) {
  return Surface3(AnalyticSphere{center, radius});
}

inline Surface3 make_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles) {
  return Surface3(TriMesh3D{std::move(vertices), std::move(triangles)});
}

/// Icosahedron subdivided `level` times (1 -> 4 per level), projected onto the
/// sphere. Outward winding.
inline Surface3 make_sphere_mesh(const Vec3& center, double radius, int level) {
  if (!(radius > 0.0)) throw ValidationError("sphere radius must be positive");
  if (level < 0) throw ValidationError("subdivision level must be non-negative");
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
                         {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * f.size());
    for (const auto& t : f) {
      const int a = midpoint(t[0], t[1]), b = midpoint(t[1], t[2]), c = midpoint(t[2], t[0]);
      next.push_back({t[0], a, c});
      next.push_back({t[1], b, a});
      next.push_back({t[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  for (auto& t : f) {
    const Vec3 n = (v[t[1]] - v[t[0]]).cross(v[t[2]] - v[t[0]]);
    if (n.dot(v[t[0]] + v[t[1]] + v[t[2]]) < 0.0) std::swap(t[1], t[2]);
  }
  for (auto& p : v) p = center + radius * p;
  return make_mesh(std::move(v), std::move(f));
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_decimal(const std::string& tok, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid number '" + tok + "'", line);
  }
  if (used != tok.size() || !std::isfinite(v)) throw ParseError("invalid number '" + tok + "'", line);
  return v;
}

inline int parse_index(const std::string& tok, int line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid vertex index '" + tok + "'", line);
  }
  if (used != tok.size() || v < 1) throw ParseError("invalid vertex index '" + tok + "'", line);
  return static_cast<int>(v);
}

inline std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Reads the OBJ subset: `v x y z`, `f i j k` (1-based, triangles only),
/// `#` comments and blank lines. Anything else is a ParseError.
inline Surface3 load_mesh(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> face_lines;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::strip(raw);
    if (s.empty() || s[0] == '#') continue;
    const auto tok = detail::split_ws(s);
    if (tok[0] == "v") {
      if (tok.size() != 4) throw ParseError("vertex needs exactly three coordinates", line);
      vertices.emplace_back(detail::parse_decimal(tok[1], line), detail::parse_decimal(tok[2], line),
                            detail::parse_decimal(tok[3], line));
    } else if (tok[0] == "f") {
      if (tok.size() != 4) throw ParseError("only triangular faces are supported", line);
      triangles.push_back({detail::parse_index(tok[1], line) - 1, detail::parse_index(tok[2], line) - 1,
                           detail::parse_index(tok[3], line) - 1});
      face_lines.push_back(line);
    } else {
      throw ParseError("unsupported directive '" + tok[0] + "'", line);
    }
  }
  for (std::size_t f = 0; f < triangles.size(); ++f)
    for (int k : triangles[f])
      if (k >= static_cast<int>(vertices.size())) throw ParseError("face references a missing vertex", face_lines[f]);
  return make_mesh(std::move(vertices), std::move(triangles));
}

/// Reads a polyline: a `closed` or `open` header, then one `x y` pair per line.
inline Curve2 load_polyline(std::istream& in) {
  std::string raw;
  int line = 0;
  std::optional<bool> closed;
  std::vector<Vec2> vertices;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::strip(raw);
    if (s.empty() || s[0] == '#') continue;
    if (!closed) {
      if (s == "closed") closed = true;
      else if (s == "open") closed = false;
      else throw ParseError("expected header 'closed' or 'open'", line);
      continue;
    }
    const auto tok = detail::split_ws(s);
    if (tok.size() != 2) throw ParseError("expected an 'x y' pair", line);
    vertices.emplace_back(detail::parse_decimal(tok[0], line), detail::parse_decimal(tok[1], line));
  }
  if (!closed) throw ParseError("missing 'closed'/'open' header", line);
  return make_polyline(std::move(vertices), *closed);
}

// ---------------------------------------------------------------------------
// Region
// ---------------------------------------------------------------------------

template <int N>
struct BallShape {
  Vec<N> center = Vec<N>::Zero();
  double radius = 1.0;
};

template <int N>
struct BoxShape {
  Vec<N> lo = Vec<N>::Zero();
  Vec<N> hi = Vec<N>::Ones();
};

/// Parameter interval [lo, hi] of a line o + t d inside a convex set.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

namespace detail {

template <int N>
std::optional<Interval> ball_chord(const BallShape<N>& b, const Vec<N>& o, const Vec<N>& d) {
  // |o + t d - c|^2 = r^2 with |d| = 1.
  const Vec<N> oc = o - b.center;
  const double half_b = oc.dot(d);
  const double c = oc.squaredNorm() - b.radius * b.radius;
  const double disc = half_b * half_b - c;
  if (!(disc > 0.0)) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double q = -(half_b + std::copysign(sq, half_b));
  double t1 = q, t2 = q != 0.0 ? c / q : -q;
  if (q == 0.0) {
    t1 = -sq;
    t2 = sq;
  }
  if (t1 > t2) std::swap(t1, t2);
  return Interval{t1, t2};
}

template <int N>
std::optional<Interval> box_chord(const BoxShape<N>& b, const Vec<N>& o, const Vec<N>& d) {
  double t0 = -kInf, t1 = kInf;
  for (int k = 0; k < N; ++k) {
    if (d[k] == 0.0) {
      if (o[k] <= b.lo[k] || o[k] >= b.hi[k]) return std::nullopt;
      continue;
    }
    double ta = (b.lo[k] - o[k]) / d[k], tb = (b.hi[k] - o[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (!(t1 > t0)) return std::nullopt;
  return Interval{t0, t1};
}

}  // namespace detail

/// Bounded open window (ball or axis-aligned box).
template <int N>
class Region {
 public:
  using Shape = std::variant<BallShape<N>, BoxShape<N>>;

  explicit Region(Shape shape) : shape_(std::move(shape)) {
    if (const auto* b = std::get_if<BallShape<N>>(&shape_)) {
      if (!(b->radius > 0.0)) throw ValidationError("region ball radius must be positive");
    } else {
      const auto& x = std::get<BoxShape<N>>(shape_);
      if (!((x.lo.array() < x.hi.array()).all())) throw ValidationError("region box needs min < max componentwise");
    }
  }

  static Region ball(const Vec<N>& c, double r) { return Region(BallShape<N>{c, r}); }
  static Region box(const Vec<N>& lo, const Vec<N>& hi) { return Region(BoxShape<N>{lo, hi}); }

  const Shape& shape() const { return shape_; }

  bool contains(const Vec<N>& p) const {
    if (const auto* b = std::get_if<BallShape<N>>(&shape_)) return (p - b->center).norm() < b->radius;
    const auto& x = std::get<BoxShape<N>>(shape_);
    return (p.array() > x.lo.array()).all() && (p.array() < x.hi.array()).all();
  }

  /// Chord of the unit-direction line o + t d.
  std::optional<Interval> chord(const Vec<N>& o, const Vec<N>& d) const {
    if (const auto* b = std::get_if<BallShape<N>>(&shape_)) return detail::ball_chord<N>(*b, o, d);
    return detail::box_chord<N>(std::get<BoxShape<N>>(shape_), o, d);
  }

  Vec<N> bounding_center() const {
    if (const auto* b = std::get_if<BallShape<N>>(&shape_)) return b->center;
    const auto& x = std::get<BoxShape<N>>(shape_);
    return 0.5 * (x.lo + x.hi);
  }

  double bounding_radius() const {
    if (const auto* b = std::get_if<BallShape<N>>(&shape_)) return b->radius;
    const auto& x = std::get<BoxShape<N>>(shape_);
    return 0.5 * (x.hi - x.lo).norm();
  }

  double volume() const {
    if (const auto* b = std::get_if<BallShape<N>>(&shape_))
      return unit_ball_volume(N) * std::pow(b->radius, N);
    const auto& x = std::get<BoxShape<N>>(shape_);
    return (x.hi - x.lo).prod();
  }

 private:
  Shape shape_;
};

/// True when every point of S lies in the open region.
template <int N>
bool surface_inside(const OrientedSurface<N>& s, const Region<N>& omega) {
  if constexpr (N == 2) {
    if (const auto* c = std::get_if<AnalyticCircle>(&s.representation())) {
      if (const auto* b = std::get_if<BallShape<2>>(&omega.shape()))
        return (c->center - b->center).norm() + c->radius < b->radius;
      const auto& x = std::get<BoxShape<2>>(omega.shape());
      return ((c->center.array() - c->radius) > x.lo.array()).all() &&
             ((c->center.array() + c->radius) < x.hi.array()).all();
    }
    if (const auto* a = std::get_if<AnalyticArc>(&s.representation())) {
      for (int k = 0; k <= 4096; ++k) {
        const double ang = a->angle_start + (a->angle_end - a->angle_start) * k / 4096.0;
        if (!omega.contains(OrientedSurface<2>::arc_point(*a, ang))) return false;
      }
      return true;
    }
    for (const auto& v : std::get<Polyline2D>(s.representation()).vertices)
      if (!omega.contains(v)) return false;
    return true;
  } else {
    if (const auto* sp = std::get_if<AnalyticSphere>(&s.representation())) {
      if (const auto* b = std::get_if<BallShape<3>>(&omega.shape()))
        return (sp->center - b->center).norm() + sp->radius < b->radius;
      const auto& x = std::get<BoxShape<3>>(omega.shape());
      return ((sp->center.array() - sp->radius) > x.lo.array()).all() &&
             ((sp->center.array() + sp->radius) < x.hi.array()).all();
    }
    for (const auto& v : std::get<TriMesh3D>(s.representation()).vertices)
      if (!omega.contains(v)) return false;
    return true;
  }
}

}  // namespace fracsurf
