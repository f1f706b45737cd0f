#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "fracsurf/cov.hpp"
#include "fracsurf/extrapolation.hpp"
#include "fracsurf/kernel.hpp"
#include "fracsurf/montecarlo.hpp"
#include "fracsurf/solid.hpp"

namespace fracsurf {

// ---------------------------------------------------------------------------
// Region descriptors for the interaction functional
// ---------------------------------------------------------------------------

/// Intersection of solids, windows and their complements.
template <int N>
class SetExpr {
 public:
  using Atom = std::variant<SolidSet<N>, Region<N>>;

  SetExpr() = default;
  static SetExpr all() { return SetExpr(); }
  static SetExpr in(const Atom& a) { return SetExpr().and_in(a); }
  static SetExpr out(const Atom& a) { return SetExpr().and_out(a); }

  SetExpr and_in(const Atom& a) const {
    SetExpr e = *this;
    e.literals_.push_back({a, false});
    return e;
  }
  SetExpr and_out(const Atom& a) const {
    SetExpr e = *this;
    e.literals_.push_back({a, true});
    return e;
  }

  /// Parameter set of the unit-direction line o + t d inside the expression.
  IntervalSet on_line(const Vec<N>& o, const Vec<N>& d) const {
    IntervalSet acc = IntervalSet::all();
    for (const auto& lit : literals_) {
      const auto chord = std::visit([&](const auto& x) { return x.chord(o, d); }, lit.atom);
      IntervalSet piece = IntervalSet::of(chord);
      acc = lit.complement ? acc.minus(piece) : acc.intersect(piece);
      if (acc.empty()) break;
    }
    return acc;
  }

  /// Smallest ball containing one of the bounded non-complemented atoms.
  std::optional<std::pair<Vec<N>, double>> bounding_ball() const {
    std::optional<std::pair<Vec<N>, double>> best;
    for (const auto& lit : literals_) {
      if (lit.complement) continue;
      std::optional<std::pair<Vec<N>, double>> b;
      if (const auto* s = std::get_if<SolidSet<N>>(&lit.atom)) {
        if (s->bounded()) b = std::make_pair(s->bounding_center(), s->bounding_radius());
      } else {
        const auto& r = std::get<Region<N>>(lit.atom);
        b = std::make_pair(r.bounding_center(), r.bounding_radius());
      }
      if (b && (!best || b->second < best->second)) best = b;
    }
    return best;
  }

 private:
  struct Literal {
    Atom atom;
    bool complement;
  };
  std::vector<Literal> literals_;
};

// ---------------------------------------------------------------------------
// Random lines
// ---------------------------------------------------------------------------

/// A line o + t d, d a unit vector, drawn from the invariant line measure
/// restricted to lines meeting the ball B(c, R).
template <int N>
std::pair<Vec<N>, Vec<N>> sample_line(Rng& rng, const Vec<N>& c, double radius) {
  Vec<N> d = random_direction<N>(rng);
  if (d[N - 1] < 0.0) d = -d;
  if constexpr (N == 2) {
    const Vec2 w(-d.y(), d.x());
    return {c + radius * (2.0 * rng.uniform() - 1.0) * w, d};
  } else {
    const Vec3 t1 = any_orthogonal<3>(d);
    const Vec3 t2 = d.cross(t1).normalized();
    const double r = radius * std::sqrt(rng.uniform());
    const double a = 2.0 * kPi * rng.uniform();
    return {c + r * (std::cos(a) * t1 + std::sin(a) * t2), d};
  }
}

/// Measure of the lines meeting B(c, R) divided by alpha_(n-1): the factor
/// turning the mean per-line integral of |xi - eta|^(-1-2s) into a kappa
/// pair integral.
template <int N>
double line_scale(double radius) {
  return 0.5 * unit_sphere_measure(N - 1) * std::pow(radius, N - 1);
}

/// I(A, B): the kappa pair integral over A x B, by exact integration along
/// random lines.
template <int N>
Estimate interaction(const SetExpr<N>& a, const SetExpr<N>& b, const FractionalOrder& order, std::uint64_t n,
                     std::uint64_t seed, const Execution& exec = {}, std::uint64_t stream = 0) {
  auto ball = a.bounding_ball();
  const auto bb = b.bounding_ball();
  if (!ball || (bb && bb->second < ball->second)) ball = bb;
  if (!ball) throw ValidationError("interaction needs at least one bounded set");
  const double s = order.s();
  Estimate e = mc_mean(n, seed, stream, exec, [&](Rng& rng) -> std::optional<double> {
    const auto [o, d] = sample_line<N>(rng, ball->first, ball->second);
    const IntervalSet ia = a.on_line(o, d), ib = b.on_line(o, d);
    const IntervalSet common = ia.intersect(ib);
    for (const auto& overlap : common.parts())
      if (overlap.length() > 1e-12 * ball->second) throw ValidationError("interaction sets overlap");
    return interval_interaction(ia, ib, s);
  });
  const double scale = line_scale<N>(ball->second);
  e.value *= scale;
  e.std_error *= scale;
  return e;
}

// ---------------------------------------------------------------------------
// s-perimeter
// ---------------------------------------------------------------------------

enum class PerimeterMethod { SetPairs, CrossingParity };

inline const char* to_string(PerimeterMethod m) {
  return m == PerimeterMethod::SetPairs ? "SetPairs" : "CrossingParity";
}

/// s-Per(E) = I(E, CE). SetPairs integrates E x CE along random lines using
/// the solid's chords; CrossingParity integrates over odd-crossing pairs of
/// the boundary in (z, u, xi, eta) coordinates with weight 1/2.
template <int N>
Estimate s_perimeter(const SolidSet<N>& e, const FractionalOrder& order, PerimeterMethod method, std::uint64_t n,
                     std::uint64_t seed, const Execution& exec = {}) {
  if (!e.bounded()) throw ValidationError("s-perimeter of an unbounded set is infinite; use a relative perimeter");
  if (method == PerimeterMethod::SetPairs) {
    const SetExpr<N> inside = SetExpr<N>::in(e);
    const SetExpr<N> outside = SetExpr<N>::out(e);
    return interaction(inside, outside, order, n, seed, exec, 1);
  }
  const OrientedSurface<N> surf = e.boundary();
  Estimate est = cov_mc_mean(surf, order.s(), PairPart::Full, 0.0, std::optional<Region<N>>{}, n, seed, 2, exec);
  const double scale = 0.5 * surf.classical_measure() * unit_sphere_measure(N - 1) / FractionalOrder::alpha(N);
  est.value *= scale;
  est.std_error *= scale;
  return est;
}

/// s-Per(E, Omega) = I(E^Omega, CE^Omega) + I(E^Omega, CE\Omega) + I(E\Omega, CE^Omega).
/// Unbounded pieces are integrated exactly along each line, so no truncation
/// bias arises (bias_bound = 0).
template <int N>
Estimate s_perimeter_relative(const SolidSet<N>& e, const Region<N>& omega, const FractionalOrder& order,
                              std::uint64_t n, std::uint64_t seed, const Execution& exec = {}) {
  const double s = order.s();
  const Vec<N> c = omega.bounding_center();
  const double radius = omega.bounding_radius();
  Estimate est = mc_mean(n, seed, 3, exec, [&](Rng& rng) -> std::optional<double> {
    const auto [o, d] = sample_line<N>(rng, c, radius);
    const IntervalSet in_e = IntervalSet::of(e.chord(o, d));
    const IntervalSet in_w = IntervalSet::of(omega.chord(o, d));
    const IntervalSet out_e = in_e.complement(), out_w = in_w.complement();
    const IntervalSet e_w = in_e.intersect(in_w), ce_w = out_e.intersect(in_w);
    return interval_interaction(e_w, ce_w, s) + interval_interaction(e_w, out_e.intersect(out_w), s) +
           interval_interaction(in_e.intersect(out_w), ce_w, s);
  });
  const double scale = line_scale<N>(radius);
  est.value *= scale;
  est.std_error *= scale;
  est.bias_bound = 0.0;
  return est;
}

// ---------------------------------------------------------------------------
// s-area
// ---------------------------------------------------------------------------

struct AreaConfig {
  std::uint64_t samples = 200000;
  std::uint64_t seed = 1;
  std::optional<double> delta;
  CovConfig near;
  Execution exec;
};

struct AreaEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double bias_bound = 0.0;
  double near = 0.0;
  double near_error = 0.0;
  double far = 0.0;
  double far_std_error = 0.0;
  double delta = 0.0;
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
};

/// Largest delta = 0.1 * feature size / 2^k passing the single-crossing check.
template <int N>
double choose_delta(const OrientedSurface<N>& surf, const CovConfig& cfg) {
  double delta = 0.1 * surf.feature_size();
  for (int k = 0; k < 30; ++k, delta *= 0.5)
    if (single_crossing_holds(surf, delta, cfg.validation_samples, cfg.seed)) return delta;
  throw ValidationError("no delta passes the single-crossing validation");
}

/// s-Area(S, Omega) = 1/2 of the kappa integral over X(S) weighted by
/// max{chi_Omega(x), chi_Omega(y)}, split at |x - y| = delta into a
/// deterministic near-diagonal part and a Monte-Carlo far part.
template <int N>
AreaEstimate s_area(const OrientedSurface<N>& surf, const Region<N>& omega, const FractionalOrder& order,
                    const AreaConfig& cfg) {
  if (!surface_inside(surf, omega)) throw ValidationError("surface is not contained in the region");
  CovConfig near_cfg = cfg.near;
  near_cfg.exec = cfg.exec;
  const double delta = cfg.delta ? *cfg.delta : choose_delta(surf, near_cfg);
  const CovEstimate near = cov_near_diagonal_integral<N>(surf, omega, order, delta, near_cfg);
  Estimate far = cov_mc_mean(surf, order.s(), PairPart::Far, delta, std::optional<Region<N>>(omega), cfg.samples,
                             cfg.seed, 4, cfg.exec);
  const double scale = surf.classical_measure() * unit_sphere_measure(N - 1) / FractionalOrder::alpha(N);
  AreaEstimate a;
  a.delta = delta;
  a.near = near.value;
  a.near_error = near.error;
  a.far = far.value * scale;
  a.far_std_error = far.std_error * scale;
  a.value = 0.5 * (a.near + a.far);
  a.std_error = 0.5 * std::hypot(a.near_error, a.far_std_error);
  a.sample_count = cfg.samples;
  a.seed = cfg.seed;
  return a;
}

// ---------------------------------------------------------------------------
// s -> 1/2 sweeps
// ---------------------------------------------------------------------------

struct SweepPoint {
  double s = 0.0;
  double value = 0.0;
  double error = 0.0;
  double scaled = 0.0;        // (1 - 2s) value
  double scaled_error = 0.0;  // (1 - 2s) error
};

struct SweepResult {
  std::vector<SweepPoint> points;
  Extrapolated limit;
};

inline void check_s_grid(const std::vector<double>& grid) {
  if (grid.size() < 3) throw ValidationError("an s sweep needs at least 3 grid points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 0.5)) throw ValidationError("s values must lie in (0, 1/2)");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ValidationError("s grid must be strictly increasing");
  }
}

/// Evaluates (1 - 2s) * value over the grid and extrapolates polynomially in
/// 1 - 2s to s = 1/2. `evaluate(s)` returns {value, error}.
inline SweepResult scaled_limit_sweep(const std::function<std::pair<double, double>(double)>& evaluate,
                                      const std::vector<double>& grid) {
  check_s_grid(grid);
  SweepResult r;
  std::vector<double> x, y, sig;
  for (double s : grid) {
    const auto [v, err] = evaluate(s);
    const double t = 1.0 - 2.0 * s;
    r.points.push_back({s, v, err, t * v, t * err});
    x.push_back(t);
    y.push_back(t * v);
    sig.push_back(t * err);
  }
  r.limit = extrapolate_to_zero(x, y, sig);
  return r;
}

}  // namespace fracsurf
