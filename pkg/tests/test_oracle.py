"""The quadrature oracle itself, checked against elementary closed forms.

Everything here must hold independently of the residue machinery; the
oracle is the ground truth the rest of the suite leans on.
"""

import numpy as np
import pytest

from polygreen import oracle
from polygreen.geometry import Cage, Curve, elevate_degree
from polygreen.oracle import (
    QuadratureConfig,
    quad_dirichlet,
    quad_f_kernel,
    quad_full_deform,
    quad_neumann,
)

SEGMENT = Curve([[0.0, 0.0], [1.0, 0.0]])


def test_segment_arctangent_family():
    # int_0^1 dt / (2 pi ((t - x)^2 + y^2)) has an arctangent antiderivative
    for x, y in [(0.5, 1.0), (0.2, 0.7), (-0.4, 2.0)]:
        ref = (np.arctan((1 - x) / y) + np.arctan(x / y)) / (2 * np.pi * y)
        assert quad_f_kernel(SEGMENT, np.array([x, y]), 0) == pytest.approx(ref, abs=1e-10)


def test_segment_log_family_m1():
    # first moment: t/(t^2+y^2) type integral, log + arctangent antiderivative
    x, y = 0.5, 1.0
    u1, u0 = 1 - x, -x
    ref = (0.5 * np.log((u1**2 + y**2) / (u0**2 + y**2))
           + x / y * (np.arctan(u1 / y) - np.arctan(u0 / y))) / (2 * np.pi)
    assert quad_f_kernel(SEGMENT, np.array([x, y]), 1) == pytest.approx(ref, abs=1e-10)


def test_large_m_below_f0():
    c = Curve([[0.0, 0.0], [1.0, 0.2], [0.1, 0.5]])
    eta = np.array([0.3, 1.5])
    assert quad_f_kernel(c, eta, 12) < quad_f_kernel(c, eta, 0)


def test_focus_configuration_converges():
    p = Curve([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    val = quad_f_kernel(p, np.array([0.0, 0.25]), 0)
    assert np.isfinite(val) and val > 0


def test_tighter_tolerance_is_stable():
    c = Curve([[0.1, -0.2], [0.9, 0.6], [-0.3, 0.8]])
    eta = np.array([0.4, 0.9])
    loose = quad_f_kernel(c, eta, 2, QuadratureConfig(abs_tol=1e-9, rel_tol=1e-8))
    tight = quad_f_kernel(c, eta, 2)
    assert abs(loose - tight) < 1e-8


def test_dirichlet_zero_and_linear():
    c = Curve([[0.0, 0.0], [1.0, 0.0], [0.2, 0.6]])
    eta = np.array([0.5, 1.0])
    zero = Curve([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
    assert np.allclose(quad_dirichlet(c, zero, eta), (0, 0), atol=1e-12)
    a = Curve([[0.3, 0.1], [0.5, -0.2], [0.0, 0.4]])
    b = Curve([[-0.1, 0.6], [0.2, 0.2], [0.7, -0.3]])
    ab = Curve(a.coeffs + b.coeffs)
    lhs = quad_dirichlet(c, ab, eta)
    rhs = quad_dirichlet(c, a, eta) + quad_dirichlet(c, b, eta)
    assert np.abs(lhs - rhs).max() < 1e-10


def test_neumann_constant_deformation_vanishes():
    c = Curve([[0.0, 0.0], [1.0, 0.0], [0.2, 0.6]])
    const = Curve([[0.7, -0.4], [0.0, 0.0], [0.0, 0.0]])
    out = quad_neumann(c, const, np.array([0.5, 1.0]))
    assert np.abs(out).max() < 1e-12


def test_neumann_x_axis_reflection_symmetry():
    c = Curve([[0.0, 0.1], [1.0, 0.3], [0.2, 0.6]])
    cb = Curve([[0.2, 0.5], [0.8, -0.1], [0.1, 0.4]])
    eta = np.array([0.5, 1.2])
    flip = np.array([1.0, -1.0])
    out = quad_neumann(c, cb, eta)
    out_ref = quad_neumann(Curve(c.coeffs * flip), Curve(cb.coeffs * flip), eta * flip)
    # perp anticommutes with the reflection, so the mirrored integral is
    # the negated mirror of the original
    assert np.abs(out * flip + out_ref).max() < 1e-10


def test_full_deform_identity_and_translation(quad_cage):
    eta = np.array([0.5, 0.5])
    assert np.abs(quad_full_deform(quad_cage, quad_cage, eta) - eta).max() < 1e-8
    d = np.array([0.3, -0.2])
    shifted = Cage(tuple(
        Curve(c.coeffs + np.vstack([d, np.zeros((c.order, 2))]))
        for c in quad_cage.curves
    ))
    out = quad_full_deform(quad_cage, shifted, eta)
    assert np.abs(out - (eta + d)).max() < 1e-8


def test_closed_cage_neumann_sum_matches_encoding(quad_cage):
    # per-curve values may differ by telescoping boundary terms; the
    # closed-cage sums must agree
    from polygreen.engine import encode_point
    from polygreen.geometry import perp

    rng = np.random.default_rng(5)
    eta = np.array([0.5, 0.45])
    total_quad = np.zeros(2)
    total_enc = np.zeros(2)
    for c in quad_cage.curves:
        ct = c.trimmed()
        cb = Curve(ct.coeffs + 0.05 * rng.standard_normal(ct.coeffs.shape))
        total_quad += quad_neumann(ct, cb, eta)
        cc = encode_point(ct, eta, ct.order)
        total_enc += (cc.psi[:, None] * perp(cb.coeffs)).sum(axis=0)
    assert np.abs(total_quad - total_enc).max() < 1e-7
