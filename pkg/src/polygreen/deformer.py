"""Coordinate fields over point batches, deformation, and grid warping.

A :class:`CoordinateField` holds Phi/Psi arrays for every (point, curve)
pair, encoded once up to an m-ceiling.  Deforming is then a pure linear
combination of the deformed curves' monomial coefficients: no root
finding happens at deform time, which is what makes dragging
interactive.  Fields are immutable; changing the viewed target order is
a cheap re-slice as long as it stays within the precomputed ceiling.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from . import batch
from .errors import (
    InvalidArgumentError,
    NeedsRecomputeError,
    ShapeMismatchError,
)
from .geometry import (
    Cage,
    Curve,
    boundary_distance,
    perp,
    points_in_cage,
)

DEFAULT_M_CEILING = 8
BOUNDARY_EXCLUSION = 1e-6
MAGIC = b"PGC1"


@dataclass(frozen=True)
class CoordinateField:
    """Precomputed coordinates of a point batch against a whole cage.

    ``phi``/``psi`` have shape (n_points, n_curves, m_ceiling + 1); the
    active view is the leading ``target_order + 1`` slice.  ``points``
    is kept for convenience and is not part of the serialized format.
    """

    phi: np.ndarray
    psi: np.ndarray
    curve_orders: tuple
    target_order: int
    m_ceiling: int
    cage_signature: str = ""
    points: np.ndarray | None = None

    def __post_init__(self):
        for name in ("phi", "psi"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.phi.shape != self.psi.shape:
            raise ShapeMismatchError("phi/psi shape mismatch")
        if self.phi.shape[1] != len(self.curve_orders):
            raise ShapeMismatchError("curve count mismatch")
        if not 1 <= self.target_order <= self.m_ceiling:
            raise InvalidArgumentError("target order must be in [1, m_ceiling]")

    @property
    def n_points(self) -> int:
        return self.phi.shape[0]

    @property
    def n_curves(self) -> int:
        return self.phi.shape[1]


def build_field(cage: Cage, points, n_t: int,
                m_ceiling: int = DEFAULT_M_CEILING) -> CoordinateField:
    """Encode every point against every cage curve.

    Points outside the cage (or within the boundary exclusion band) are
    rejected with their indices; the caller pre-filters with
    :func:`filter_interior` when partial batches are acceptable.
    """
    if not 1 <= n_t <= m_ceiling:
        raise InvalidArgumentError(f"target order {n_t} outside [1, {m_ceiling}]")
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if points.shape[0]:
        inside = points_in_cage(cage, points)
        ok = inside & (boundary_distance(cage, points) > BOUNDARY_EXCLUSION)
        if not ok.all():
            bad = np.nonzero(~ok)[0].tolist()
            raise InvalidArgumentError(
                f"points outside the cage or on its boundary: indices {bad}"
            )
    n_c = len(cage)
    cap = m_ceiling
    P = points.shape[0]
    phi = np.zeros((P, n_c, cap + 1))
    psi = np.zeros((P, n_c, cap + 1))
    orders = []
    for k, c in enumerate(cage.curves):
        ct = c.trimmed()
        orders.append(ct.order)
        if P:
            phi[:, k, :], psi[:, k, :] = batch.encode_batch(ct, points, cap)
    return CoordinateField(
        phi=phi,
        psi=psi,
        curve_orders=tuple(orders),
        target_order=n_t,
        m_ceiling=cap,
        cage_signature=cage.signature(extra=cap),
        points=points,
    )


def filter_interior(cage: Cage, points,
                    margin: float = BOUNDARY_EXCLUSION) -> tuple[np.ndarray, np.ndarray]:
    """Split points into (interior indices, rejected indices)."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if points.shape[0] == 0:
        return np.array([], dtype=int), np.array([], dtype=int)
    ok = points_in_cage(cage, points) & (boundary_distance(cage, points) > margin)
    return np.nonzero(ok)[0], np.nonzero(~ok)[0]


def _deformed_coeffs(field: CoordinateField, deformed) -> np.ndarray:
    """Stack deformed monomial coefficients into (n_curves, n_t+1, 2)."""
    curves = deformed.curves if isinstance(deformed, Cage) else tuple(deformed)
    if len(curves) != field.n_curves:
        raise ShapeMismatchError(
            f"deformed cage has {len(curves)} curves, field expects {field.n_curves}"
        )
    n_t = field.target_order
    out = np.zeros((len(curves), n_t + 1, 2))
    for k, c in enumerate(curves):
        coeffs = c.coeffs if isinstance(c, Curve) else np.asarray(c, dtype=float)
        if coeffs.shape[0] - 1 != n_t:
            raise ShapeMismatchError(
                f"curve {k} has order {coeffs.shape[0] - 1}, expected n_t = {n_t}"
            )
        out[k] = coeffs
    return out


def deform(field: CoordinateField, deformed) -> np.ndarray:
    """Apply a deformed cage: f = sum_c (Phi . cbar + Psi . cbar^perp)."""
    cbar = _deformed_coeffs(field, deformed)
    m = field.target_order + 1
    phi = field.phi[:, :, :m]
    psi = field.psi[:, :, :m]
    out = np.einsum("pcm,cmx->px", phi, cbar)
    out += np.einsum("pcm,cmx->px", psi, perp(cbar))
    return out


def change_target_order(field: CoordinateField, n_t: int) -> CoordinateField:
    """Re-view the field at a different target order without re-encoding."""
    if n_t < 1:
        raise InvalidArgumentError("target order must be >= 1")
    if n_t > field.m_ceiling:
        raise NeedsRecomputeError(
            f"target order {n_t} exceeds precomputed ceiling {field.m_ceiling}"
        )
    return replace(field, target_order=n_t)


@dataclass(frozen=True)
class WarpResult:
    rest_points: np.ndarray      # (P, 2) interior lattice points
    deformed_points: np.ndarray  # (P, 2)
    triangles: np.ndarray        # (T, 3) indices into the point arrays


def warp_grid(cage: Cage, deformed, resolution: int,
              margin: float = BOUNDARY_EXCLUSION) -> WarpResult:
    """Deform a regular lattice over the cage bounding box.

    The lattice is restricted to interior points; cells whose four
    corners are all interior contribute two triangles, so the result can
    be rendered as a textured mesh.
    """
    if resolution < 2:
        raise InvalidArgumentError("resolution must be >= 2")
    curves = deformed.curves if isinstance(deformed, Cage) else tuple(deformed)
    n_t = max(c.order for c in curves)
    lo, hi = cage.bounding_box()
    if np.any(hi - lo <= 0):
        raise InvalidArgumentError("degenerate cage bounding box")
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)

    keep, _ = filter_interior(cage, pts, margin)
    index = -np.ones(pts.shape[0], dtype=int)
    index[keep] = np.arange(len(keep))
    rest = pts[keep]

    tris = []
    r = resolution
    for row in range(r - 1):
        for col in range(r - 1):
            a = index[row * r + col]
            b = index[row * r + col + 1]
            c = index[(row + 1) * r + col]
            d = index[(row + 1) * r + col + 1]
            if a >= 0 and b >= 0 and d >= 0:
                tris.append((a, b, d))
            if a >= 0 and d >= 0 and c >= 0:
                tris.append((a, d, c))
    triangles = np.array(tris, dtype=int).reshape(-1, 3)

    field = build_field(cage, rest, n_t, m_ceiling=max(n_t, 1))
    warped = deform(field, curves)
    return WarpResult(rest_points=rest, deformed_points=warped, triangles=triangles)


# --- binary serialization -------------------------------------------------
#
# Little-endian: magic "PGC1", u32 n_points, u32 n_curves, u32 n_s per
# curve, u32 n_t, u32 m_ceiling, then the Phi and Psi arrays as row-major
# float64 of shape (n_points, n_curves, m_ceiling + 1).  Byte output is
# deterministic for identical inputs.


def field_to_bytes(field: CoordinateField) -> bytes:
    head = [MAGIC, struct.pack("<II", field.n_points, field.n_curves)]
    head.append(struct.pack(f"<{field.n_curves}I", *field.curve_orders))
    head.append(struct.pack("<II", field.target_order, field.m_ceiling))
    body_phi = np.ascontiguousarray(field.phi, dtype="<f8").tobytes()
    body_psi = np.ascontiguousarray(field.psi, dtype="<f8").tobytes()
    return b"".join(head) + body_phi + body_psi


def field_from_bytes(data: bytes) -> CoordinateField:
    if data[:4] != MAGIC:
        raise InvalidArgumentError("not a coordinate-field file (bad magic)")
    off = 4
    n_points, n_curves = struct.unpack_from("<II", data, off)
    off += 8
    orders = struct.unpack_from(f"<{n_curves}I", data, off)
    off += 4 * n_curves
    n_t, m_ceiling = struct.unpack_from("<II", data, off)
    off += 8
    count = n_points * n_curves * (m_ceiling + 1)
    phi = np.frombuffer(data, dtype="<f8", count=count, offset=off)
    off += count * 8
    psi = np.frombuffer(data, dtype="<f8", count=count, offset=off)
    shape = (n_points, n_curves, m_ceiling + 1)
    return CoordinateField(
        phi=phi.reshape(shape),
        psi=psi.reshape(shape),
        curve_orders=tuple(int(o) for o in orders),
        target_order=int(n_t),
        m_ceiling=int(m_ceiling),
    )


def save_field(field: CoordinateField, path):
    with open(path, "wb") as f:
        f.write(field_to_bytes(field))


def load_field(path) -> CoordinateField:
    with open(path, "rb") as f:
        return field_from_bytes(f.read())
