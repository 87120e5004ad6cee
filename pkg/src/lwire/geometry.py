"""Planar curve families for the bent-wire model and their grid geometry.

Two symmetric curve families, both with straight asymptotes at polar angles
±β, 0 < β < π/2:

  * ``Wedge`` — two half-lines meeting at the origin (a sharp corner);
  * ``FilletedWedge`` — the same half-lines joined by a circular arc of
    radius ``fillet_radius`` tangent to both, so the curve is C¹ and
    coincides with its asymptotes outside a compact set.

The curve divides the plane into a convex "interior" (the side containing
the positive x-axis far from the bend) and its complement, the "exterior".
All operations are closed-form: arclength parametrization, nearest-point
distance, region classification, curvature radius, and exact clipping of
the curve against axis-aligned boxes (used to lump the δ-line onto grid
cells).

Arclength convention: s < 0 on the lower branch, s > 0 on the upper branch.
For the fillet, s = 0 sits at the arc midpoint on the symmetry axis; the arc
occupies |s| <= s_arc = fillet_radius·(π/2 - β).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "CurveKind",
    "CurveSpec",
    "BiasOrientation",
    "RegionLabel",
    "CornerError",
    "point_at",
    "tangent_at",
    "curvature_radius",
    "s_compact",
    "distance_to_curve",
    "distance_to_curve_many",
    "classify_region",
    "interior_mask",
    "on_curve_tolerance",
    "cell_arclength",
    "length_in_box",
    "straight_pieces",
    "arc_length_in_box",
    "clip_ray_to_box",
    "curve_quadrature_in_box",
]


class CornerError(ValueError):
    """Curvature queried at a tangent discontinuity."""


class CurveKind(Enum):
    WEDGE = "wedge"
    FILLETED_WEDGE = "filleted_wedge"


class BiasOrientation(Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"


class RegionLabel(Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"
    ON_CURVE = "on_curve"


@dataclass(frozen=True)
class CurveSpec:
    kind: CurveKind
    beta: float
    fillet_radius: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.beta < math.pi / 2):
            raise ValueError(f"beta must lie in (0, pi/2), got {self.beta}")
        if self.kind is CurveKind.WEDGE:
            if self.fillet_radius != 0.0:
                raise ValueError("a Wedge has no fillet; use FilletedWedge")
        else:
            if not (self.fillet_radius > 0):
                raise ValueError("FilletedWedge needs fillet_radius > 0")

    # -- derived fillet geometry ------------------------------------------
    @property
    def arc_center(self) -> np.ndarray:
        """Fillet arc center, on the symmetry axis at distance r/sin(beta)."""
        return np.array([self.fillet_radius / math.sin(self.beta), 0.0])

    @property
    def tangency_t(self) -> float:
        """Ray parameter (= polar radius) of the arc/line tangency points."""
        return self.fillet_radius / math.tan(self.beta)

    @property
    def s_arc(self) -> float:
        """Arclength of each half of the fillet arc."""
        return self.fillet_radius * (math.pi / 2 - self.beta)


def _ray_dirs(c: CurveSpec):
    ux, uy = math.cos(c.beta), math.sin(c.beta)
    return np.array([ux, uy]), np.array([ux, -uy])


def s_compact(c: CurveSpec) -> float:
    """Arclength beyond which the curve lies exactly on its asymptotes."""
    return 0.0 if c.kind is CurveKind.WEDGE else c.s_arc


def point_at(c: CurveSpec, s: float) -> np.ndarray:
    """Unit-speed parametrization L(s)."""
    up, dn = _ray_dirs(c)
    if c.kind is CurveKind.WEDGE:
        return abs(s) * (up if s >= 0 else dn)
    sa = c.s_arc
    r = c.fillet_radius
    if s > sa:
        return c.tangency_t * up + (s - sa) * up
    if s < -sa:
        return c.tangency_t * dn + (-s - sa) * dn
    theta = math.pi - s / r
    return c.arc_center + r * np.array([math.cos(theta), math.sin(theta)])


def tangent_at(c: CurveSpec, s: float) -> np.ndarray:
    """Unit tangent dL/ds; raises at the wedge corner."""
    up, dn = _ray_dirs(c)
    if c.kind is CurveKind.WEDGE:
        if s == 0:
            raise CornerError("tangent undefined at the wedge corner s = 0")
        return up if s > 0 else -dn
    sa = c.s_arc
    if s > sa:
        return up
    if s < -sa:
        return -dn
    theta = math.pi - s / c.fillet_radius
    return np.array([math.sin(theta), -math.cos(theta)])


def curvature_radius(c: CurveSpec, s: float) -> float:
    """Curvature radius R(s): +inf on straight parts, fillet_radius on the arc."""
    if c.kind is CurveKind.WEDGE:
        if s == 0:
            raise CornerError("curvature undefined at the wedge corner s = 0")
        return math.inf
    return c.fillet_radius if abs(s) <= c.s_arc else math.inf


def on_curve_tolerance(pt) -> float:
    """Distance below which a point is reported as lying on the curve."""
    return 1e-12 * max(1.0, math.hypot(float(pt[0]), float(pt[1])))


def _ray_candidates(x, y, ox, oy, ux, uy, tmin, s_of_t):
    """Nearest point on the ray (ox,oy)+t(ux,uy), t >= tmin; returns (d, s)."""
    t = (x - ox) * ux + (y - oy) * uy
    t = np.maximum(t, tmin)
    fx = ox + t * ux
    fy = oy + t * uy
    d = np.hypot(x - fx, y - fy)
    return d, s_of_t(t)


def distance_to_curve_many(c: CurveSpec, x, y):
    """Vectorized distance and nearest-arclength: min over s of |pt - L(s)|.

    Ties (points equidistant from several branches) resolve to the candidate
    with the smallest |s|.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    up, dn = _ray_dirs(c)
    cands = []
    if c.kind is CurveKind.WEDGE:
        d, s = _ray_candidates(x, y, 0.0, 0.0, up[0], up[1], 0.0, lambda t: t)
        cands.append((d, s))
        d, s = _ray_candidates(x, y, 0.0, 0.0, dn[0], dn[1], 0.0, lambda t: -t)
        cands.append((d, s))
    else:
        r = c.fillet_radius
        sa = c.s_arc
        cx, cy = c.arc_center
        vx = x - cx
        vy = y - cy
        rho = np.hypot(vx, vy)
        theta = np.arctan2(vy, vx)
        in_window = np.abs(theta) >= math.pi / 2 + c.beta
        d_arc = np.where(in_window, np.abs(rho - r), np.inf)
        # theta -> s: upper half of the arc has theta in [pi/2+beta, pi],
        # lower half wraps to negative angles
        s_arcpt = np.where(theta >= 0, (math.pi - theta) * r, -(math.pi + theta) * r)
        s_arcpt = np.where(rho > 0, s_arcpt, 0.0)  # center point: any foot; pick s=0
        d_arc = np.where(rho > 0, d_arc, r)
        cands.append((d_arc, np.clip(s_arcpt, -sa, sa)))
        t0 = c.tangency_t
        px, py = t0 * up
        d, s = _ray_candidates(x, y, px, py, up[0], up[1], 0.0,
                               lambda t: sa + t)
        cands.append((d, s))
        px, py = t0 * dn
        d, s = _ray_candidates(x, y, px, py, dn[0], dn[1], 0.0,
                               lambda t: -sa - t)
        cands.append((d, s))
    D = np.stack([d for d, _ in cands])
    S = np.stack([np.broadcast_to(s, D.shape[1:]) for _, s in cands])
    # lexicographic (d, |s|): argmin picks the first minimum, so order the
    # candidates small-|s| first (arc before rays, upper before lower)
    best = np.argmin(D, axis=0)
    idx = (best, *np.indices(D.shape[1:]))
    return D[idx], S[idx]


def distance_to_curve(c: CurveSpec, pt) -> tuple[float, float]:
    d, s = distance_to_curve_many(c, pt[0], pt[1])
    return float(d), float(s)


def interior_mask(c: CurveSpec, x, y) -> np.ndarray:
    """Vectorized strict-interior test (curve points themselves excluded)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    phi = np.arctan2(y, x)
    cone = np.abs(phi) < c.beta
    if c.kind is CurveKind.WEDGE:
        return cone & (np.hypot(x, y) > 0)
    cx, cy = c.arc_center
    theta = np.arctan2(y - cy, x - cx)
    rho = np.hypot(x - cx, y - cy)
    behind_arc = (np.abs(theta) >= math.pi / 2 + c.beta) & (rho >= c.fillet_radius)
    return cone & ~behind_arc


def classify_region(c: CurveSpec, pt) -> RegionLabel:
    """Interior (convex side), Exterior, or OnCurve within the geometric tolerance."""
    d, _ = distance_to_curve(c, pt)
    if d <= on_curve_tolerance(pt):
        return RegionLabel.ON_CURVE
    return RegionLabel.INTERIOR if bool(interior_mask(c, pt[0], pt[1])) \
        else RegionLabel.EXTERIOR


# -- clipping -------------------------------------------------------------

def _clip_ray_to_box(ox, oy, ux, uy, xmin, xmax, ymin, ymax):
    """Parameter range of ray-box intersection; unit direction, t >= 0."""
    tmin, tmax = 0.0, math.inf
    for o, u, lo, hi in ((ox, ux, xmin, xmax), (oy, uy, ymin, ymax)):
        if u == 0.0:
            if not (lo <= o <= hi):
                return 0.0, 0.0
        else:
            ta, tb = (lo - o) / u, (hi - o) / u
            if ta > tb:
                ta, tb = tb, ta
            tmin = max(tmin, ta)
            tmax = min(tmax, tb)
    return (tmin, tmax) if tmax > tmin else (0.0, 0.0)


def arc_length_in_box(c: CurveSpec, xmin, xmax, ymin, ymax) -> float:
    """Exact length of the fillet arc inside a box via angular clipping."""
    if c.kind is CurveKind.WEDGE:
        return 0.0
    r = c.fillet_radius
    cx, cy = c.arc_center
    lo = math.pi / 2 + c.beta
    hi = 3 * math.pi / 2 - c.beta
    angles = [lo, hi]
    for xv in (xmin, xmax):
        q = (xv - cx) / r
        if abs(q) <= 1.0:
            a = math.acos(q)
            angles.extend([a, 2 * math.pi - a])
    for yv in (ymin, ymax):
        q = (yv - cy) / r
        if abs(q) <= 1.0:
            a = math.asin(q)
            angles.extend([a % (2 * math.pi), (math.pi - a) % (2 * math.pi)])
    angles = sorted(a for a in angles if lo <= a <= hi)
    total = 0.0
    for a0, a1 in zip(angles[:-1], angles[1:]):
        if a1 <= a0:
            continue
        am = 0.5 * (a0 + a1)
        px = cx + r * math.cos(am)
        py = cy + r * math.sin(am)
        if xmin <= px <= xmax and ymin <= py <= ymax:
            total += r * (a1 - a0)
    return total


def straight_pieces(c: CurveSpec):
    """(ox, oy, ux, uy) of the two straight branches, unit direction, t >= 0."""
    up, dn = _ray_dirs(c)
    if c.kind is CurveKind.WEDGE:
        return ((0.0, 0.0, up[0], up[1]), (0.0, 0.0, dn[0], dn[1]))
    t0 = c.tangency_t
    return ((t0 * up[0], t0 * up[1], up[0], up[1]),
            (t0 * dn[0], t0 * dn[1], dn[0], dn[1]))


def clip_ray_to_box(ox, oy, ux, uy, xmin, xmax, ymin, ymax):
    """Parameter range [t0, t1] of a straight branch inside a box."""
    return _clip_ray_to_box(ox, oy, ux, uy, xmin, xmax, ymin, ymax)


def length_in_box(c: CurveSpec, xmin, xmax, ymin, ymax) -> float:
    """Exact curve length inside an axis-aligned box."""
    total = 0.0
    for ox, oy, ux, uy in straight_pieces(c):
        t0, t1 = _clip_ray_to_box(ox, oy, ux, uy, xmin, xmax, ymin, ymax)
        total += t1 - t0
    total += arc_length_in_box(c, xmin, xmax, ymin, ymax)
    return total


def curve_quadrature_in_box(c: CurveSpec, xmin, xmax, ymin, ymax,
                            ds: float):
    """Midpoint arclength quadrature of the in-box part of the curve.

    Returns (points, weights) with sum(weights) equal to the exact in-box
    length of each clipped piece (the straight parts exactly, the arc to
    the resolution of the angular clipping).
    """
    pts = []
    wts = []
    for ox, oy, ux, uy in straight_pieces(c):
        t0, t1 = _clip_ray_to_box(ox, oy, ux, uy, xmin, xmax, ymin, ymax)
        if t1 <= t0:
            continue
        m = max(1, int(math.ceil((t1 - t0) / ds)))
        edges = np.linspace(t0, t1, m + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        pts.append(np.column_stack([ox + mid * ux, oy + mid * uy]))
        wts.append(np.full(m, (t1 - t0) / m))
    if c.kind is CurveKind.FILLETED_WEDGE:
        r = c.fillet_radius
        cx, cy = c.arc_center
        lo = math.pi / 2 + c.beta
        hi = 3 * math.pi / 2 - c.beta
        m = max(1, int(math.ceil(r * (hi - lo) / ds)))
        edges = np.linspace(lo, hi, m + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        px = cx + r * np.cos(mid)
        py = cy + r * np.sin(mid)
        keep = (px >= xmin) & (px <= xmax) & (py >= ymin) & (py <= ymax)
        pts.append(np.column_stack([px[keep], py[keep]]))
        wts.append(np.full(int(keep.sum()), r * (hi - lo) / m))
    if not pts:
        return np.zeros((0, 2)), np.zeros(0)
    return np.concatenate(pts), np.concatenate(wts)


def cell_arclength(c: CurveSpec, x0: float, y0: float, h: float) -> float:
    """Length of the curve inside the square [x0, x0+h] x [y0, y0+h]."""
    if not (h > 0):
        raise ValueError("cell size must be positive")
    return length_in_box(c, x0, x0 + h, y0, y0 + h)
