#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "fracsurf/geometry.hpp"

namespace fracsurf {

template <int N>
struct BallSolid {
  Vec<N> center = Vec<N>::Zero();
  double radius = 1.0;
};

/// {y : (y - point) . normal < 0}; `normal` is the outward unit normal.
template <int N>
struct HalfSpaceSolid {
  Vec<N> point = Vec<N>::Zero();
  Vec<N> normal = Vec<N>::UnitX();
};

template <int N>
struct BoxSolid {
  Vec<N> lo = Vec<N>::Zero();
  Vec<N> hi = Vec<N>::Ones();
};

/// Intersection of open half-spaces {y : normals[i] . y < offsets[i]}.
template <int N>
struct PolytopeSolid {
  std::vector<Vec<N>> normals;
  std::vector<double> offsets;
  std::optional<OrientedSurface<N>> surface;
};

/// A solid set E with an outward-oriented boundary.
template <int N>
class SolidSet {
 public:
  using Shape = std::variant<BallSolid<N>, HalfSpaceSolid<N>, BoxSolid<N>, PolytopeSolid<N>>;

  explicit SolidSet(Shape shape) : shape_(std::move(shape)) {
    if (const auto* b = std::get_if<BallSolid<N>>(&shape_)) {
      if (!(b->radius > 0.0) || !std::isfinite(b->radius)) throw ValidationError("ball radius must be positive");
    } else if (auto* h = std::get_if<HalfSpaceSolid<N>>(&shape_)) {
      const double len = h->normal.norm();
      if (!(len > 0.0)) throw ValidationError("half-space normal must be nonzero");
      h->normal /= len;
    } else if (const auto* x = std::get_if<BoxSolid<N>>(&shape_)) {
      if (!((x->lo.array() < x->hi.array()).all())) throw ValidationError("box needs min < max componentwise");
    }
  }

  static SolidSet ball(const Vec<N>& c, double r) { return SolidSet(BallSolid<N>{c, r}); }
  static SolidSet half_space(const Vec<N>& p, const Vec<N>& n) { return SolidSet(HalfSpaceSolid<N>{p, n}); }
  static SolidSet box(const Vec<N>& lo, const Vec<N>& hi) { return SolidSet(BoxSolid<N>{lo, hi}); }

  /// Solid bounded by a closed, convex, outward-wound triangle mesh.
  static SolidSet polytope(const OrientedSurface<N>& mesh) {
    static_assert(N == 3, "polytopes are built from triangle meshes");
    const auto* m = std::get_if<TriMesh3D>(&mesh.representation());
    if (!m || !mesh.closed()) throw ValidationError("polytope needs a closed triangle mesh");
    PolytopeSolid<N> p;
    const auto& d = mesh.data();
    for (std::size_t f = 0; f < m->triangles.size(); ++f) {
      const Vec<N> n = static_cast<double>(mesh.orientation()) * d.element_normals[f];
      p.normals.push_back(n);
      p.offsets.push_back(n.dot(m->vertices[m->triangles[f][0]]));
    }
    const double tol = 1e-9 * mesh.enclosing_diameter();
    for (const auto& v : m->vertices)
      for (std::size_t f = 0; f < p.normals.size(); ++f)
        if (p.normals[f].dot(v) > p.offsets[f] + tol) throw ValidationError("mesh is not convex with outward normals");
    p.surface = mesh;
    return SolidSet(std::move(p));
  }

  const Shape& shape() const { return shape_; }

  bool bounded() const { return !std::holds_alternative<HalfSpaceSolid<N>>(shape_); }

  bool contains(const Vec<N>& y) const { return signed_distance(y) < 0.0; }

  /// Negative inside, positive outside. Exact for balls and half-spaces; for
  /// boxes and polytopes the largest facet-plane distance (same zero set).
  double signed_distance(const Vec<N>& y) const {
    if (const auto* b = std::get_if<BallSolid<N>>(&shape_)) return (y - b->center).norm() - b->radius;
    if (const auto* h = std::get_if<HalfSpaceSolid<N>>(&shape_)) return (y - h->point).dot(h->normal);
    if (const auto* x = std::get_if<BoxSolid<N>>(&shape_)) {
      double m = -kInf;
      for (int k = 0; k < N; ++k) m = std::max({m, x->lo[k] - y[k], y[k] - x->hi[k]});
      return m;
    }
    const auto& p = std::get<PolytopeSolid<N>>(shape_);
    double m = -kInf;
    for (std::size_t i = 0; i < p.normals.size(); ++i) m = std::max(m, p.normals[i].dot(y) - p.offsets[i]);
    return m;
  }

  /// Parameter interval of the unit-direction line o + t d inside E. Ends may
  /// be infinite for half-spaces.
  std::optional<Interval> chord(const Vec<N>& o, const Vec<N>& d) const {
    if (const auto* b = std::get_if<BallSolid<N>>(&shape_)) return detail::ball_chord<N>({b->center, b->radius}, o, d);
    if (const auto* x = std::get_if<BoxSolid<N>>(&shape_)) return detail::box_chord<N>({x->lo, x->hi}, o, d);
    if (const auto* h = std::get_if<HalfSpaceSolid<N>>(&shape_)) {
      const double dn = d.dot(h->normal);
      const double s0 = (o - h->point).dot(h->normal);
      if (dn == 0.0) {
        if (s0 < 0.0) return Interval{-kInf, kInf};
        return std::nullopt;
      }
      const double t = -s0 / dn;
      return dn > 0.0 ? Interval{-kInf, t} : Interval{t, kInf};
    }
    const auto& p = std::get<PolytopeSolid<N>>(shape_);
    double lo = -kInf, hi = kInf;
    for (std::size_t i = 0; i < p.normals.size(); ++i) {
      const double dn = p.normals[i].dot(d);
      const double s0 = p.normals[i].dot(o) - p.offsets[i];
      if (dn == 0.0) {
        if (s0 >= 0.0) return std::nullopt;
        continue;
      }
      const double t = -s0 / dn;
      if (dn > 0.0) hi = std::min(hi, t);
      else lo = std::max(lo, t);
    }
    if (!(hi > lo)) return std::nullopt;
    return Interval{lo, hi};
  }

  /// Center and radius of a ball containing E (bounded solids only).
  Vec<N> bounding_center() const {
    if (const auto* b = std::get_if<BallSolid<N>>(&shape_)) return b->center;
    if (const auto* x = std::get_if<BoxSolid<N>>(&shape_)) return 0.5 * (x->lo + x->hi);
    if (const auto* p = std::get_if<PolytopeSolid<N>>(&shape_)) return p->surface->bbox_center();
    throw ValidationError("half-space is unbounded");
  }

  double bounding_radius() const {
    if (const auto* b = std::get_if<BallSolid<N>>(&shape_)) return b->radius;
    if (const auto* x = std::get_if<BoxSolid<N>>(&shape_)) return 0.5 * (x->hi - x->lo).norm();
    if (const auto* p = std::get_if<PolytopeSolid<N>>(&shape_)) return 0.5 * p->surface->enclosing_diameter();
    throw ValidationError("half-space is unbounded");
  }

  /// Outward-oriented boundary surface.
  OrientedSurface<N> boundary() const {
    if (const auto* b = std::get_if<BallSolid<N>>(&shape_)) {
      if constexpr (N == 2) return make_circle(b->center, b->radius);
      else return make_sphere(b->center, b->radius);
    }
    if (const auto* x = std::get_if<BoxSolid<N>>(&shape_)) {
      if constexpr (N == 2) {
        return make_polyline({x->lo, Vec2(x->hi.x(), x->lo.y()), x->hi, Vec2(x->lo.x(), x->hi.y())}, true);
      } else {
        std::vector<Vec3> v;
        for (int k = 0; k < 8; ++k)
          v.emplace_back((k & 1) ? x->hi.x() : x->lo.x(), (k & 2) ? x->hi.y() : x->lo.y(),
                         (k & 4) ? x->hi.z() : x->lo.z());
        std::vector<std::array<int, 3>> f = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                                             {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
        return make_mesh(std::move(v), std::move(f));
      }
    }
    if (const auto* p = std::get_if<PolytopeSolid<N>>(&shape_)) return *p->surface;
    throw ValidationError("half-space boundary is unbounded");
  }

  /// Diameter scale used for on-boundary tolerances.
  double scale() const { return bounded() ? 2.0 * bounding_radius() : 1.0; }

 private:
  Shape shape_;
};

}  // namespace fracsurf
