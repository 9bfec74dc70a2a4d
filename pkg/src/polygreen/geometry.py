"""Curves, cages, basis conversions, and cage validity checks.

Curves are stored in the monomial basis c(t) = sum_k t^k c_k; the Bezier
(Bernstein) control-point form is a view obtained through an invertible
linear transform.  Cages are closed CCW loops of curves.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np
import shapely

from .errors import InvalidArgumentError, InvalidCageError, InvalidCurveError

CLOSURE_TOL = 1e-9
ELEVATION_TOL = 1e-12
DEFAULT_BOUNDARY_SAMPLES = 64


def _as_points(points, min_count=2):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < min_count:
        raise InvalidCurveError(
            f"expected at least {min_count} 2D points, got array of shape {pts.shape}"
        )
    if not np.all(np.isfinite(pts)):
        raise InvalidCurveError("points contain NaN or Inf")
    return pts


@dataclass(frozen=True)
class Curve:
    """One polynomial cage edge in monomial coefficients.

    ``coeffs`` has shape (order+1, 2); row k is the coefficient of t^k.
    A zero leading coefficient is permitted (it arises from degree
    elevation); numerical routines work on :meth:`trimmed`, which drops
    trailing zero rows so the stored order matches the true degree.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        pts = _as_points(self.coeffs)
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "coeffs", pts)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def trimmed(self) -> "Curve":
        """Drop trailing (near-)zero coefficients down to order >= 1."""
        scale = max(float(np.abs(self.coeffs).max()), 1e-300)
        k = self.order
        while k > 1 and np.all(np.abs(self.coeffs[k]) <= 1e-14 * scale):
            k -= 1
        if k == self.order:
            return self
        return Curve(self.coeffs[: k + 1])

    def point(self, t):
        """Evaluate c(t) by Horner's rule; t may be scalar or array."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (2,))
        for row in self.coeffs[::-1]:
            out = out * t[..., None] + row
        return out

    def derivative_coeffs(self) -> np.ndarray:
        k = np.arange(1, self.order + 1)
        return self.coeffs[1:] * k[:, None]

    def complex_coeffs(self) -> np.ndarray:
        return self.coeffs[:, 0] + 1j * self.coeffs[:, 1]


def perp(v):
    """The operator (a, b) -> (b, -a), applied along the last axis."""
    v = np.asarray(v, dtype=float)
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


@lru_cache(maxsize=None)
def _bezier_to_monomial_matrix(n: int) -> np.ndarray:
    m = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        for j in range(k + 1):
            m[k, j] = comb(n, j) * comb(n - j, k - j) * (-1) ** (k - j)
    return m


@lru_cache(maxsize=None)
def _monomial_to_bezier_matrix(n: int) -> np.ndarray:
    return np.linalg.inv(_bezier_to_monomial_matrix(n))


def bezier_to_monomial(control_points) -> Curve:
    """Convert Bezier control points to a monomial-basis curve."""
    pts = _as_points(control_points)
    n = pts.shape[0] - 1
    return Curve(_bezier_to_monomial_matrix(n) @ pts)


def monomial_to_bezier(curve: Curve) -> np.ndarray:
    """Exact inverse of :func:`bezier_to_monomial`."""
    return _monomial_to_bezier_matrix(curve.order) @ curve.coeffs


def evaluate(curve: Curve, t):
    return curve.point(t)


def elevate_degree(curve: Curve, target_order: int) -> Curve:
    """Degree-elevate without changing the traced point set."""
    if target_order < curve.order:
        raise InvalidArgumentError(
            f"target order {target_order} is below curve order {curve.order}"
        )
    b = monomial_to_bezier(curve)
    while b.shape[0] - 1 < target_order:
        n = b.shape[0] - 1
        w = np.arange(1, n + 1)[:, None] / (n + 1)
        mid = w * b[:-1] + (1 - w) * b[1:]
        b = np.vstack([b[:1], mid, b[-1:]])
    return bezier_to_monomial(b)


@dataclass(frozen=True)
class Cage:
    """A closed, CCW-oriented loop of curves."""

    curves: tuple

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        if len(self.curves) < 2:
            raise InvalidCageError("cage needs at least 2 curves")

    def __len__(self):
        return len(self.curves)

    def sample_boundary(self, samples_per_curve=DEFAULT_BOUNDARY_SAMPLES) -> np.ndarray:
        """Dense polyline along the whole boundary (closing point omitted)."""
        t = np.linspace(0.0, 1.0, samples_per_curve, endpoint=False)
        return np.concatenate([c.point(t) for c in self.curves])

    def polygon(self, samples_per_curve=DEFAULT_BOUNDARY_SAMPLES):
        return shapely.Polygon(self.sample_boundary(samples_per_curve))

    def diameter(self, samples_per_curve=DEFAULT_BOUNDARY_SAMPLES) -> float:
        hull = self.polygon(samples_per_curve).convex_hull
        pts = np.asarray(hull.exterior.coords)
        d = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    def bounding_box(self, samples_per_curve=DEFAULT_BOUNDARY_SAMPLES):
        pts = self.sample_boundary(samples_per_curve)
        return pts.min(axis=0), pts.max(axis=0)

    def signature(self, extra="") -> str:
        h = hashlib.sha256()
        for c in self.curves:
            h.update(np.ascontiguousarray(c.coeffs).tobytes())
        h.update(str(extra).encode())
        return h.hexdigest()


@dataclass
class CageReport:
    """Outcome of :func:`validate_cage`; lists every violated invariant."""

    closure_gaps: list = field(default_factory=list)  # (curve index, gap size)
    orientation_ok: bool = True
    self_intersections: list = field(default_factory=list)  # (i, j, point)

    @property
    def ok(self) -> bool:
        return not self.closure_gaps and self.orientation_ok and not self.self_intersections

    def __str__(self):
        if self.ok:
            return "cage valid"
        lines = []
        for k, gap in self.closure_gaps:
            lines.append(f"closure gap {gap:.3g} at joint after curve {k}")
        if not self.orientation_ok:
            lines.append("orientation is clockwise (must be counter-clockwise)")
        for i, j, pt in self.self_intersections:
            lines.append(f"boundary self-intersection near {pt} (curves {i}, {j})")
        return "; ".join(lines)


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def validate_cage(cage: Cage, closure_tol=CLOSURE_TOL,
                  samples_per_curve=DEFAULT_BOUNDARY_SAMPLES) -> CageReport:
    """Check closure, orientation, and (sampled) self-intersection."""
    report = CageReport()
    n = len(cage)
    for k, c in enumerate(cage.curves):
        gap = float(np.linalg.norm(c.point(1.0) - cage.curves[(k + 1) % n].point(0.0)))
        if gap > closure_tol:
            report.closure_gaps.append((k, gap))

    pts = cage.sample_boundary(samples_per_curve)
    if _signed_area(pts) <= 0:
        report.orientation_ok = False

    ring = shapely.LineString(np.vstack([pts, pts[:1]]))
    if not ring.is_simple:
        report.self_intersections.extend(_find_intersections(cage, samples_per_curve))
    return report


def _find_intersections(cage, samples_per_curve):
    """Locate offending curve pairs by pairwise sampled-segment tests.

    Adjacent curves are allowed exactly one contact (the shared joint);
    anything more, or any contact between non-adjacent curves, is reported.
    """
    found = []
    t = np.linspace(0.0, 1.0, samples_per_curve + 1)
    lines = [shapely.LineString(c.point(t)) for c in cage.curves]
    n = len(lines)
    for i in range(n):
        if not lines[i].is_simple:
            p = lines[i].interpolate(0.5, normalized=True)
            found.append((i, i, (round(p.x, 6), round(p.y, 6))))
        for j in range(i + 1, n):
            inter = lines[i].intersection(lines[j])
            if inter.is_empty:
                continue
            pts = [g for g in shapely.get_parts(inter) if g.geom_type == "Point"]
            allowed = 1 if (j - i) in (1, n - 1) else 0
            if len(pts) > allowed or len(pts) < shapely.get_num_geometries(inter):
                p = shapely.get_parts(inter)[-1].centroid
                found.append((i, j, (round(p.x, 6), round(p.y, 6))))
    return found


def point_in_cage(cage: Cage, p, samples_per_curve=DEFAULT_BOUNDARY_SAMPLES) -> bool:
    """Winding-number test on the sampled boundary.

    Points on (the sampled approximation of) the boundary are treated as
    outside, so the result is deterministic there.
    """
    return bool(shapely.contains_xy(cage.polygon(samples_per_curve), p[0], p[1]))


def points_in_cage(cage: Cage, pts, samples_per_curve=DEFAULT_BOUNDARY_SAMPLES) -> np.ndarray:
    """Vectorized :func:`point_in_cage` for an (N, 2) array."""
    pts = np.asarray(pts, dtype=float)
    poly = cage.polygon(samples_per_curve)
    return shapely.contains_xy(poly, pts[:, 0], pts[:, 1])


def boundary_distance(cage: Cage, pts, samples_per_curve=DEFAULT_BOUNDARY_SAMPLES) -> np.ndarray:
    """Distance of each point to the sampled boundary polyline."""
    pts = np.asarray(pts, dtype=float)
    ring = shapely.LinearRing(cage.sample_boundary(samples_per_curve))
    return shapely.distance(ring, shapely.points(pts))


# --- JSON interchange -----------------------------------------------------
#
# { "curves": [ { "basis": "bezier" | "monomial", "points": [[x, y], ...] } ] }
# Curves are listed in CCW traversal order; order = len(points) - 1.


def cage_from_json(obj, snap_tol=0.0) -> Cage:
    """Build a cage from the JSON schema; optionally snap tiny closure gaps.

    With ``snap_tol > 0``, endpoint gaps below it are closed by moving each
    curve's last Bezier control point onto the next curve's first one.
    """
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        entries = obj["curves"]
    except (TypeError, KeyError) as exc:
        raise InvalidCageError("cage JSON must contain a 'curves' list") from exc
    beziers = []
    for e in entries:
        basis = e.get("basis", "bezier")
        pts = _as_points(e["points"])
        if basis == "bezier":
            beziers.append(pts)
        elif basis == "monomial":
            beziers.append(monomial_to_bezier(Curve(pts)))
        else:
            raise InvalidCageError(f"unknown basis {basis!r}")
    if snap_tol > 0:
        n = len(beziers)
        for k in range(n):
            nxt = beziers[(k + 1) % n]
            gap = np.linalg.norm(beziers[k][-1] - nxt[0])
            if 0 < gap <= snap_tol:
                beziers[k] = np.vstack([beziers[k][:-1], nxt[:1]])
    return Cage(tuple(bezier_to_monomial(b) for b in beziers))


def cage_to_json(cage: Cage, basis="bezier") -> dict:
    curves = []
    for c in cage.curves:
        pts = monomial_to_bezier(c) if basis == "bezier" else c.coeffs
        curves.append({"basis": basis, "points": [[float(x), float(y)] for x, y in pts]})
    return {"curves": curves}


def load_cage(path, snap_tol=0.0) -> Cage:
    with open(path) as f:
        return cage_from_json(json.load(f), snap_tol=snap_tol)


def save_cage(cage: Cage, path, basis="bezier"):
    with open(path, "w") as f:
        json.dump(cage_to_json(cage, basis=basis), f, indent=1)
