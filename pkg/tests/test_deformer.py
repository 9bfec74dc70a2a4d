import numpy as np
import pytest

from polygreen import deformer
from polygreen.deformer import (
    CoordinateField,
    build_field,
    change_target_order,
    deform,
    field_from_bytes,
    field_to_bytes,
    warp_grid,
)
from polygreen.errors import (
    InvalidArgumentError,
    NeedsRecomputeError,
    ShapeMismatchError,
)
from polygreen.geometry import Cage, Curve, elevate_degree
from tests.conftest import interior_points


def _translated(cage, d):
    d = np.asarray(d, dtype=float)
    return Cage(tuple(
        Curve(c.coeffs + np.vstack([d, np.zeros((c.order, 2))]))
        for c in cage.curves
    ))


def _similarity(cage, s, theta, d=(0.0, 0.0)):
    R = s * np.array([[np.cos(theta), -np.sin(theta)],
                      [np.sin(theta), np.cos(theta)]])
    d = np.asarray(d, dtype=float)
    return Cage(tuple(
        Curve(c.coeffs @ R.T + np.vstack([d, np.zeros((c.order, 2))]))
        for c in cage.curves
    ))


def _elevated(cage, n_t):
    return tuple(elevate_degree(c.trimmed(), n_t) for c in cage.curves)


def test_field_shapes(square_cage):
    f = build_field(square_cage, [[0.5, 0.5]], 1)
    assert f.n_points == 1
    assert f.n_curves == 4
    assert f.phi.shape == (1, 4, deformer.DEFAULT_M_CEILING + 1)


def test_empty_point_list_is_valid(square_cage):
    f = build_field(square_cage, np.zeros((0, 2)), 2)
    assert f.n_points == 0
    out = deform(f, _elevated(square_cage, 2))
    assert out.shape == (0, 2)


def test_outside_points_rejected_with_indices(square_cage):
    with pytest.raises(InvalidArgumentError) as exc:
        build_field(square_cage, [[0.5, 0.5], [2.0, 0.0], [0.5, 0.4], [-1.0, 0.0]], 1)
    assert "1" in str(exc.value) and "3" in str(exc.value)


def test_reproduction_identity(blob_cage):
    pts = interior_points(blob_cage, 200, seed=1)
    f = build_field(blob_cage, pts, 3)
    out = deform(f, _elevated(blob_cage, 3))
    assert np.abs(out - pts).max() < 1e-6 * blob_cage.diameter()


def test_translation(blob_cage):
    pts = interior_points(blob_cage, 100, seed=2)
    f = build_field(blob_cage, pts, 3)
    d = np.array([1.5, -0.7])
    out = deform(f, _elevated(_translated(blob_cage, d), 3))
    assert np.abs(out - (pts + d)).max() < 1e-6


def test_similarity_equivariance(blob_cage):
    pts = interior_points(blob_cage, 100, seed=3)
    f = build_field(blob_cage, pts, 3)
    s, th, d = 1.7, 0.8, np.array([0.2, 0.4])
    out = deform(f, _elevated(_similarity(blob_cage, s, th, d), 3))
    R = s * np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    assert np.abs(out - (pts @ R.T + d)).max() < 1e-6


def test_order_mismatch_raises(blob_cage):
    pts = interior_points(blob_cage, 5)
    f = build_field(blob_cage, pts, 2)
    with pytest.raises(ShapeMismatchError):
        deform(f, _elevated(blob_cage, 3))
    with pytest.raises(ShapeMismatchError):
        deform(f, _elevated(blob_cage, 3)[:4])


def test_change_target_order_views(blob_cage):
    pts = interior_points(blob_cage, 20)
    f = build_field(blob_cage, pts, 3, m_ceiling=6)
    same = change_target_order(f, 3)
    assert np.array_equal(same.phi, f.phi)
    up = change_target_order(f, 6)
    back = change_target_order(up, 3)
    assert back.phi.tobytes() == f.phi.tobytes()
    assert back.psi.tobytes() == f.psi.tobytes()
    with pytest.raises(NeedsRecomputeError):
        change_target_order(f, 7)
    # deform through the raised view matches a fresh deformation
    out_up = deform(up, _elevated(blob_cage, 6))
    assert np.abs(out_up - pts).max() < 1e-6


def test_serialization_roundtrip_and_determinism(quad_cage):
    pts = interior_points(quad_cage, 30, seed=8)
    f = build_field(quad_cage, pts, 2)
    blob1 = field_to_bytes(f)
    blob2 = field_to_bytes(build_field(quad_cage, pts, 2))
    assert blob1 == blob2
    g = field_from_bytes(blob1)
    assert np.array_equal(g.phi, f.phi)
    assert np.array_equal(g.psi, f.psi)
    assert g.curve_orders == f.curve_orders
    assert g.target_order == f.target_order
    out = deform(g, _elevated(quad_cage, 2))
    assert np.abs(out - pts).max() < 1e-6


def test_bad_magic_rejected():
    with pytest.raises(InvalidArgumentError):
        field_from_bytes(b"NOPE" + b"\x00" * 64)


def test_warp_grid_identity_and_translation(blob_cage):
    res = warp_grid(blob_cage, _elevated(blob_cage, 3), 24)
    assert np.abs(res.deformed_points - res.rest_points).max() < 1e-6
    d = np.array([0.4, 0.9])
    res2 = warp_grid(blob_cage, _elevated(_translated(blob_cage, d), 3), 24)
    assert np.abs(res2.deformed_points - (res2.rest_points + d)).max() < 1e-6


def test_warp_grid_bent_cage_is_locally_injective(blob_cage, blob_bent_cage):
    from polygreen.geometry import boundary_distance

    res = warp_grid(blob_cage, _elevated(blob_bent_cage, 3), 32)
    assert np.all(np.isfinite(res.deformed_points))

    def signed_areas(pts):
        a = pts[res.triangles[:, 0]]
        b = pts[res.triangles[:, 1]]
        c = pts[res.triangles[:, 2]]
        u, v = b - a, c - a
        return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

    # triangles well inside the cage must keep their orientation
    far = boundary_distance(blob_cage, res.rest_points) > 0.05 * blob_cage.diameter()
    interior_tris = far[res.triangles].all(axis=1)
    assert interior_tris.any()
    rest_sign = np.sign(signed_areas(res.rest_points)[interior_tris])
    warp_sign = np.sign(signed_areas(res.deformed_points)[interior_tris])
    assert np.array_equal(rest_sign, warp_sign)


def test_field_rejects_inconsistent_arrays():
    with pytest.raises(ShapeMismatchError):
        CoordinateField(
            phi=np.zeros((2, 3, 4)), psi=np.zeros((2, 3, 5)),
            curve_orders=(1, 1, 1), target_order=1, m_ceiling=3,
        )
