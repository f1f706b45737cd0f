#!/usr/bin/env python3
"""Reference values for the fixture suite.

Every oracle here is an independent brute-force or dense-quadrature
computation written directly in numpy/scipy; none of it reuses the C++ code.
Run from the repository root:

    python3 tools/gen_fixtures.py [--out fixtures] [--only NAME ...]
"""

import argparse
import json
import math
import pathlib
import sys

import numpy as np
from scipy import integrate, special

GENERATOR_VERSION = "1.0"
PI = math.pi


def quad(f, a, b, points=None, **kw):
    kw.setdefault("limit", 500)
    kw.setdefault("epsabs", 1e-13)
    kw.setdefault("epsrel", 1e-12)
    val, _ = integrate.quad(f, a, b, points=points, **kw)
    return val


def write(out, name, command, scenario, value, params):
    doc = {
        "fixture_name": name,
        "inputs": {"command": command, "scenario": scenario},
        "oracle_value": value,
        "oracle_params": params,
        "generator_version": GENERATOR_VERSION,
    }
    path = out / f"{name}.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"{name}: {value!r}")


# ---------------------------------------------------------------------------
# Unit disk / unit ball, z on the boundary, outward normal.
#
# Along a ray z + r u the indicator is +1 inside, -1 outside. With symmetric
# eps exclusion the eps^(-2s) terms of opposite rays cancel, leaving per
# inward ray (chord length L) the finite part -2 L^(-2s) / (2s).
# ---------------------------------------------------------------------------


def disk_pv(s):
    # directions u = (cos t, sin t) around z = (1, 0); inward when cos t < 0,
    # chord length L = -2 cos t.
    f = lambda t: -2.0 * (-2.0 * math.cos(t)) ** (-2 * s) / (2 * s)
    return quad(f, PI / 2, PI) + quad(f, PI, 3 * PI / 2)


def disk_pv_dense(s, angles=2000, radii=20000):
    # Polar grid in (r, theta) around z with an explicit in/out test and a
    # symmetric eps exclusion; radial integrals per cell of constant sign.
    # Angles are graded cubically toward the two tangent directions.
    q = angles // 4
    v = (np.arange(q) + 0.5) / q
    off, dw = 0.5 * PI * v ** 3, 0.5 * PI * 3 * v ** 2 / q
    t = np.concatenate([0.5 * PI - off, 0.5 * PI + off, 1.5 * PI - off, 1.5 * PI + off])
    w = np.concatenate([dw] * 4)
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    eps, r_far = 1e-6, 10.0
    r = np.geomspace(eps, r_far, radii)
    mid = 0.5 * (r[:-1] + r[1:])
    shells = (r[:-1] ** (-2 * s) - r[1:] ** (-2 * s)) / (2 * s)
    total = 0.0
    for k in range(len(t)):
        pts = np.array([1.0, 0.0]) + np.outer(mid, u[k])
        inside = np.where(np.sum(pts * pts, axis=1) < 1.0, 1.0, -1.0)
        total += w[k] * (np.sum(inside * shells) - r_far ** (-2 * s) / (2 * s))
    return float(total)


def disk_closed_form(s):
    return -(2.0 ** (-2 * s) / (2 * s)) * math.sqrt(PI) * special.gamma(0.5 - s) / special.gamma(1 - s)


def disk_directional(s):
    # Half-plane spanned by e = (0, 1) and n = (1, 0): u = sin(a) e + cos(a) n,
    # a in (0, pi); inward rays are those with cos(a) < 0.
    f = lambda a: -2.0 * (-2.0 * math.cos(a)) ** (-2 * s) / (2 * s)
    return quad(f, PI / 2, PI)


def ball_pv(s):
    # Spherical coordinates about n: inward when cos(b) < 0, chord -2 cos(b).
    f = lambda b: 2 * PI * math.sin(b) * (-2.0 * (-2.0 * math.cos(b)) ** (-2 * s) / (2 * s))
    return quad(f, PI / 2, PI)


def arc_pv(s):
    # Upper half of the unit circle, z = (0, 1), u = (cos p, sin p). A ray
    # with sin p < 0 meets the circle again at (-sin 2p, cos 2p); only when
    # that point lies on the arc (cos 2p >= 0) does the sign flip to -1.
    f = lambda p: -2.0 * (-2.0 * math.sin(p)) ** (-2 * s) / (2 * s)
    return quad(f, -PI, -0.75 * PI) + quad(f, -0.25 * PI, 0.0)


# ---------------------------------------------------------------------------
# Pair integrals, kernel 1 / (alpha_1 |x - y|^(2 + 2s)), alpha_1 = 2.
# ---------------------------------------------------------------------------


def square_halves_interaction(s):
    # A = [0, 1/2] x [0, 1], B = [1/2, 1] x [0, 1]. In the difference d = y - x
    # the overlap measure factorizes as L1(d1) L2(d2); integrate in polar
    # coordinates about d = 0 (the singular point).
    def l1(d1):
        return d1 if d1 <= 0.5 else max(0.0, 1.0 - d1)

    def inner(phi):
        c, sn = math.cos(phi), math.sin(phi)
        rmax = min(1.0 / c, 1.0 / sn) if sn > 0 else 1.0 / c
        g = lambda r: l1(r * c) * (1.0 - r * sn) * r ** (-1 - 2 * s)
        return quad(g, 0.0, rmax, points=[0.5 / c] if 0.5 / c < rmax else None)

    return 2.0 * quad(inner, 0.0, PI / 2, epsrel=1e-10) / 2.0


def disk_perimeter(s):
    # (1/2) int_B int_{|y|>1} |x-y|^(-2-2s): inner integral in polar
    # coordinates about x = (a, 0) is int rho(theta)^(-2s) / (2s) d theta.
    def rho(a, t):
        return -a * math.cos(t) + math.sqrt(1.0 - (a * math.sin(t)) ** 2)

    def ring(a):
        return 2 * PI * a * 2.0 * quad(lambda t: rho(a, t) ** (-2 * s) / (2 * s), 0.0, PI, epsrel=1e-11)

    return 0.5 * quad(ring, 0.0, 1.0, epsrel=1e-10)


def halfplane_relative_perimeter(s):
    # E = {y2 < 0}, Omega = unit disk; Per = 2 I(E^O, CE) - I(E^O, CE^O).
    beta = special.beta(0.5, 0.5 + s)
    strip = quad(lambda h: h ** (-2 * s) * 2.0 * math.sqrt(1.0 - h * h), 0.0, 1.0)
    i1 = 0.5 * beta / (2 * s) * strip

    def inner(x1, h):
        # x = (x1, -h); rays going up, theta in (0, pi).
        def g(t):
            ux, uy = math.cos(t), math.sin(t)
            xu = x1 * ux - h * uy
            r_out = -xu + math.sqrt(max(0.0, xu * xu - (x1 * x1 + h * h) + 1.0))
            r_in = h / uy
            if r_out <= r_in:
                return 0.0
            return (r_in ** (-2 * s) - r_out ** (-2 * s)) / (2 * s)

        return quad(g, 0.0, PI, epsrel=1e-8, epsabs=1e-12)

    def row(h):
        w = math.sqrt(1.0 - h * h)
        return quad(lambda x1: inner(x1, h), -w, w, epsrel=1e-7, epsabs=1e-11)

    i2 = 0.5 * quad(row, 0.0, 1.0, epsrel=1e-6, epsabs=1e-10)
    return 2.0 * i1 - i2, {"I_EO_CE": i1, "I_EO_CEO": i2}


# ---------------------------------------------------------------------------
# s-area of the upper unit half-circle in Omega = B(0, 2) by exact integration
# along every line: dx dy = |t - tau| dt dtau dp dtheta in the plane.
# ---------------------------------------------------------------------------


def _g(d, s):
    t = 1.0 - 2 * s
    return d ** t / (2 * s * t)


def _pair(a, b, s):
    # int_a int_b |t - tau|^(-1-2s), interval a entirely left of interval b.
    (a1, a2), (b1, b2) = a, b
    v = -_g(b1 - a2, s) if b1 > a2 else 0.0
    if math.isfinite(b2):
        v += _g(b2 - a2, s)
    if math.isfinite(a1):
        v += _g(b1 - a1, s)
        if math.isfinite(b2):
            v -= _g(b2 - a1, s)
    return v


def _split(iv, w):
    # pieces of iv tagged inside/outside the window chord w
    lo, hi = iv
    out = []
    for a, b, inside in ((lo, min(hi, w[0]), False), (max(lo, w[0]), min(hi, w[1]), True), (max(lo, w[1]), hi, False)):
        if b > a:
            out.append(((a, b), inside))
    return out


def _line_pairs(left, right, w, s):
    total = 0.0
    for a, ia in _split(left, w):
        for b, ib in _split(right, w):
            if ia or ib:
                total += _pair(a, b, s)
    return total


def arc_area(s, window_radius=2.0):
    inf = math.inf

    def line(p, th):
        d = (math.cos(th), math.sin(th))
        n = (-math.sin(th), math.cos(th))
        q = math.sqrt(max(0.0, 1.0 - p * p))
        cuts = sorted(t for t in (-q, q) if p * n[1] + t * d[1] >= 0.0)
        wr = math.sqrt(window_radius ** 2 - p * p)
        w = (-wr, wr)
        if len(cuts) == 1:
            c = cuts[0]
            return _line_pairs((-inf, c), (c, inf), w, s)
        if len(cuts) == 2:
            c1, c2 = cuts
            return _line_pairs((-inf, c1), (c1, c2), w, s) + _line_pairs((c1, c2), (c2, inf), w, s)
        return 0.0

    def over_p(th):
        pts = sorted({-abs(math.sin(th)), abs(math.sin(th))})
        return quad(lambda p: line(p, th), -1.0, 1.0, points=pts, epsrel=1e-10, epsabs=1e-12)

    # ordered pairs = 2 x unordered; 1/2 from the definition; 1/alpha_1 = 1/2
    return 0.5 * quad(over_p, 0.0, PI, points=[PI / 2], epsrel=1e-9, epsabs=1e-11)


# ---------------------------------------------------------------------------
# Near-diagonal pairs across a flat segment: Monte Carlo in (x, y) space.
# ---------------------------------------------------------------------------


def flat_segment_near_diagonal(s, delta, length, samples, seed):
    # Pairs with |x - y| < delta whose segment crosses [0, L] x {0}. Draw x
    # uniformly in the band of half-width delta around the segment and a
    # direction theta uniformly; the admissible radii are r in (r0, delta)
    # with r0 the distance to the crossing, integrated exactly.
    rng = np.random.default_rng(seed)
    box_lo = np.array([-delta, -delta])
    box_hi = np.array([length + delta, delta])
    area = np.prod(box_hi - box_lo)
    chunks, size = [], 1_000_000
    for start in range(0, samples, size):
        m = min(size, samples - start)
        x = box_lo + (box_hi - box_lo) * rng.random((m, 2))
        th = 2 * PI * rng.random(m)
        uy = np.sin(th)
        with np.errstate(divide="ignore", invalid="ignore"):
            r0 = -x[:, 1] / uy
        hit_x = x[:, 0] + r0 * np.cos(th)
        ok = (r0 > 0) & (r0 < delta) & (hit_x >= 0) & (hit_x <= length)
        v = np.zeros(m)
        v[ok] = (r0[ok] ** (-2 * s) - delta ** (-2 * s)) / (2 * s)
        chunks.append(v)
    v = np.concatenate(chunks) * area * 2 * PI / 2.0  # 1 / alpha_1
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples))


# ---------------------------------------------------------------------------
# Interior-normal sign on a folded polyline, by brute-force segment tests.
# ---------------------------------------------------------------------------


def _segments_cross(p, q, a, b):
    def orient(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])

    d1, d2 = orient(a, b, p), orient(a, b, q)
    d3, d4 = orient(p, q, a), orient(p, q, b)
    return (d1 > 0) != (d2 > 0) and (d3 > 0) != (d4 > 0)


def normal_sign(vertices, z, y, probe):
    # hat chi(z, w) = sgn((z - w) . n(z)) (-1)^(crossings of [z, w] away from z);
    # n_Ai(y) = sigma n(y) with sigma = -hat chi(z, y + probe n(y)).
    segs = list(zip(vertices[:-1], vertices[1:]))

    def normal_at(p):
        for a, b in segs:
            ab = np.subtract(b, a)
            t = np.dot(np.subtract(p, a), ab) / np.dot(ab, ab)
            if 0 <= t <= 1 and np.linalg.norm(np.add(a, t * ab) - p) < 1e-12:
                return np.array([ab[1], -ab[0]]) / np.linalg.norm(ab), (a, b)
        raise ValueError("point not on polyline")

    nz, own = normal_at(z)

    def hat_chi(w):
        k = sum(1 for a, b in segs if (a, b) != own and _segments_cross(z, w, a, b))
        side = 1 if np.dot(np.subtract(z, w), nz) > 0 else -1
        return side * (-1) ** k

    ny, _ = normal_at(y)
    plus = hat_chi(np.add(y, probe * ny))
    minus = hat_chi(np.subtract(y, probe * ny))
    assert plus == -minus
    return -plus


# ---------------------------------------------------------------------------
# Fixture definitions
# ---------------------------------------------------------------------------

S = 0.25
UNIT_DISK = {"type": "ball", "center": [0, 0], "radius": 1}
UNIT_CIRCLE = {"type": "circle", "center": [0, 0], "radius": 1}
UPPER_ARC = {"type": "arc", "center": [0, 0], "radius": 1, "angle_start": 0, "angle_end": PI}


def rel(v, r):
    return abs(v) * r


def fx_curvature(out):
    h = disk_pv(S) / 2.0
    closed = disk_closed_form(S)
    assert abs(h - closed) < 1e-9 * abs(closed)
    write(out, "disk_pv_tilde_chi_s025", "diagnostic",
          {"quantity": "pv_tilde_chi", "solid": UNIT_DISK, "point": [1, 0], "s": S},
          disk_pv(S), {"tolerance": rel(disk_pv(S), 1e-3), "method": "polar quadrature, exact radial integrals"})
    base = {"surface": UNIT_CIRCLE, "points": [[1, 0]], "s": S}
    write(out, "disk_mean_curvature_s025", "curvature", {**base, "forms": ["Volume"]},
          h, {"tolerance": rel(h, 1e-6), "method": "polar quadrature, exact radial integrals"})
    write(out, "disk_mean_curvature_flux_s025", "curvature", {**base, "forms": ["Flux"]},
          h, {"tolerance": rel(h, 1e-5), "method": "polar quadrature, exact radial integrals"})
    k = disk_directional(S)
    write(out, "disk_directional_curvature_s025", "curvature",
          {**base, "forms": ["Directional"], "directions": [[0, 1]]},
          k, {"tolerance": rel(k, 1e-6), "method": "half-plane quadrature, exact radial integrals"})
    dense = disk_pv_dense(S) / 2.0
    write(out, "disk_mean_curvature_sign_s025", "curvature", {**base, "forms": ["Volume"]},
          dense, {"tolerance": rel(dense, 0.005), "compare": "sign",
                  "method": "dense polar grid with explicit inside test (sign convention)"})
    hb = ball_pv(S) / (2 * PI)
    write(out, "sphere_mean_curvature_s025", "curvature",
          {"dimension": 3, "surface": {"type": "sphere", "center": [0, 0, 0], "radius": 1},
           "points": [[1, 0, 0]], "s": S, "forms": ["Volume"]},
          hb, {"tolerance": rel(hb, 1e-6), "method": "spherical coordinates about the normal"})
    ha = arc_pv(S) / 2.0
    arc = {"surface": UPPER_ARC, "points": [[0, 1]], "s": S}
    write(out, "arc_mean_curvature_s025", "curvature", {**arc, "forms": ["Volume"]},
          ha, {"tolerance": rel(ha, 1e-6), "method": "polar quadrature with chord-on-arc test"})
    write(out, "arc_mean_curvature_flux_s025", "curvature", {**arc, "forms": ["Flux"]},
          ha, {"tolerance": rel(ha, 1e-5), "method": "polar quadrature with chord-on-arc test"})


def fx_perimeter(out):
    v = square_halves_interaction(S)
    write(out, "square_halves_interaction_s025", "perimeter",
          {"a": [{"type": "box", "lo": [0, 0], "hi": [0.5, 1]}],
           "b": [{"type": "box", "lo": [0.5, 0], "hi": [1, 1]}], "s": S, "samples": 200000, "seed": 11},
          v, {"tolerance": rel(v, 0.01), "method": "polar quadrature in the difference variable"})
    v = disk_perimeter(S)
    for m in ("SetPairs", "CrossingParity"):
        write(out, f"disk_s_perimeter_{m.lower()}_s025", "perimeter",
              {"solid": UNIT_DISK, "s": S, "methods": [m], "samples": 200000, "seed": 7},
              v, {"tolerance": rel(v, 0.01), "method": "radial ring quadrature"})
    v, parts = halfplane_relative_perimeter(S)
    write(out, "halfplane_relative_perimeter_disk_s025", "perimeter",
          {"solid": {"type": "half_space", "point": [0, 0], "normal": [0, 1]},
           "region": {"type": "ball", "center": [0, 0], "radius": 1}, "s": S, "samples": 400000, "seed": 5},
          v, {"tolerance": rel(v, 0.01), "method": "nested adaptive quadrature", **parts})


def fx_area(out):
    v = arc_area(S)
    write(out, "arc_s_area_s025", "area",
          {"surface": UPPER_ARC, "region": {"type": "ball", "center": [0, 0], "radius": 2},
           "s": S, "samples": 200000, "seed": 3},
          v, {"tolerance": rel(v, 0.01), "method": "exact pair integrals along every line"})


def fx_diagnostic(out):
    s, delta, length, n = 0.1, 0.1, 1.0, 10_000_000
    v, se = flat_segment_near_diagonal(s, delta, length, n, seed=20240601)
    write(out, "flat_segment_near_diagonal_s010", "diagnostic",
          {"quantity": "near_diagonal", "surface": {"type": "polyline", "vertices": [[0, 0], [length, 0]]},
           "s": s, "config": {"delta": delta}},
          v, {"tolerance": max(4 * se, 1e-3 * v), "std_error": se, "samples": n,
              "method": "Monte Carlo over (x, direction) with exact radial integral"})
    verts = [[-2, 0], [2, 0], [2, 1], [-1.5, 1], [-1.5, 0.5], [1, 0.5]]
    probes = [[0, 1], [0, 0.5], [2, 0.3], [-1.5, 0.7]]
    lengths = [4.0, 3.5, 1.0, 0.5]  # segment containing each probe
    for i, (y, ln) in enumerate(zip(probes, lengths)):
        v = normal_sign([tuple(p) for p in verts], (0, 0), tuple(y), 1e-4 * ln)
        write(out, f"spiral_normal_sign_{i}", "diagnostic",
              {"quantity": "normal_sign", "surface": {"type": "polyline", "vertices": verts},
               "point": [0, 0], "probes": probes, "s": S},
              float(v), {"tolerance": 0.5, "record": i, "method": "brute-force segment crossings"})


GROUPS = {"curvature": fx_curvature, "perimeter": fx_perimeter, "area": fx_area, "diagnostic": fx_diagnostic}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="fixtures", type=pathlib.Path)
    ap.add_argument("--only", nargs="*", choices=sorted(GROUPS), help="fixture groups to regenerate")
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.only or sorted(GROUPS):
        GROUPS[name](args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
