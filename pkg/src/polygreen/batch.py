"""Vectorized encoding of many query points against one curve.

The scalar path in :mod:`polygreen.engine` is the reference; this module
reproduces it with numpy batching for the common case (all roots simple
and non-real).  Points whose poles come close to the real axis or to each
other are routed back through the scalar branches, which handle the
special residue cases.
"""

from __future__ import annotations

import numpy as np

from . import engine
from .engine import REAL_CLASS_TOL, TWO_PI, _g0_vec, aberth_roots, newton_polish
from .errors import OnBoundaryError
from .geometry import Curve, perp

# below this pole separation the general-branch recurrence starts losing
# digits; such points take the scalar special-case path instead
ROUTE_EPS = 1e-6


def batch_roots(curve: Curve, etas: np.ndarray) -> np.ndarray:
    """Roots of the complex curve polynomial for every query point."""
    c = curve.trimmed()
    cc = c.complex_coeffs()
    n = c.order
    P = etas.shape[0]
    ez = etas[:, 0] + 1j * etas[:, 1]
    coeffs = np.tile(-cc, (P, 1))
    coeffs[:, 0] += ez
    if n == 1:
        roots = (-coeffs[:, 0] / coeffs[:, 1])[:, None]
    elif n == 2:
        roots = engine._quadratic_roots(coeffs)
    else:
        roots = aberth_roots(coeffs)
    return newton_polish(coeffs, roots)


def encode_batch(curve: Curve, etas, n_t: int) -> tuple[np.ndarray, np.ndarray]:
    """Phi/Psi arrays of shape (P, n_t + 1) for every point in ``etas``."""
    etas = np.asarray(etas, dtype=float)
    c = curve.trimmed()
    n = c.order
    m_top = n_t + 2 * n - 1
    P = etas.shape[0]
    if P == 0:
        return np.zeros((0, n_t + 1)), np.zeros((0, n_t + 1))

    roots = batch_roots(c, etas)

    # pole-separation test: pairwise root gaps and distance to the real axis
    sep = np.full(P, np.inf)
    for i in range(n):
        sep = np.minimum(sep, 2.0 * np.abs(roots[:, i].imag))
        for j in range(i + 1, n):
            sep = np.minimum(sep, np.abs(roots[:, i] - roots[:, j]))
            sep = np.minimum(sep, np.abs(roots[:, i] - np.conj(roots[:, j])))
    special = sep < ROUTE_EPS

    F = np.empty((P, m_top + 1))
    general = ~special
    if general.any():
        F[general] = _f_kernel_general(c, roots[general], m_top)
    for idx in np.nonzero(special)[0]:
        F[idx] = engine.f_kernel(c, etas[idx], m_top)

    alpha, beta = _alpha_beta_batch(c, etas)
    end = c.coeffs.sum(axis=0)
    dist = np.linalg.norm(etas - end, axis=1)
    if np.any(dist < engine.ENDPOINT_TOL):
        raise OnBoundaryError("query point at a curve endpoint")
    delta = -np.log(dist) / TWO_PI

    phi = np.zeros((P, n_t + 1))
    psi = np.zeros((P, n_t + 1))
    for i in range(2 * n - 1):
        phi += alpha[:, i : i + 1] * F[:, i : i + n_t + 1]
    for i in range(2 * n):
        psi += beta[:, i : i + 1] * F[:, i : i + n_t + 1]
    psi += delta[:, None]
    psi[:, 0] = 0.0
    return phi, psi


def _f_kernel_general(curve: Curve, roots: np.ndarray, m_top: int) -> np.ndarray:
    """Vectorized general-branch kernel for simple non-real roots."""
    P, n = roots.shape
    lead = curve.complex_coeffs()[-1]
    A = TWO_PI * abs(lead) ** 2

    # h^i(w_i) = prod_{j != i} (w_i - w_j)(w_i - conj w_j)
    h = np.ones((P, n), dtype=complex)
    for j in range(n):
        d = roots - roots[:, j : j + 1]
        dc = roots - np.conj(roots[:, j : j + 1])
        d[:, j] = 1.0
        dc[:, j] = 1.0
        h *= d * dc

    w = roots
    im = w.imag
    W = _g0_vec(w) / h
    const = (w / h).imag / im
    E = np.empty((P, n, m_top + 1))
    E[:, :, 0] = W.imag / im
    for m in range(m_top):
        if m == 0:
            E[:, :, 1] = w.real * E[:, :, 0] + W.real
            W = w * W
        else:
            E[:, :, m + 1] = w.real * E[:, :, m] + W.real + const / m
            W = w * (W + 1.0 / (m * h))

    # the forward recurrence amplifies error like |w|^m; redo the large
    # roots with the stable inverse-power tail series for g_m
    big = np.abs(w) >= engine.SERIES_OMEGA
    if big.any():
        wb = w[big]
        hb = h[big]
        g = _g_tail_vec(wb, m_top)
        E[big] = (g / hb[:, None]).imag / wb.imag[:, None]
    return E.sum(axis=1) / A


def _g_tail_vec(w: np.ndarray, m_top: int, n_terms: int = 220) -> np.ndarray:
    """Vectorized g_0..g_{m_top} tail series for a flat array of |w| > 1.

    Mirrors engine._g_tail: T(m) = sum_j w^-j/(m+j), g_m = -T(m),
    g_0 = -T(1)/w, with the stable backward step T(m) = 1/m + T(m+1)/w.
    """
    inv = 1.0 / w
    start = max(m_top, 1)
    term = np.ones_like(w)
    s = np.zeros_like(w)
    for j in range(n_terms):
        s += term / (start + j)
        term = term * inv
        if np.abs(term).max() < 1e-18:
            break
    T = s
    g = np.empty(w.shape + (m_top + 1,), dtype=complex)
    for m in range(start, 0, -1):
        if m <= m_top:
            g[:, m] = -T
        if m > 1:
            T = 1.0 / (m - 1) + inv * T
    g[:, 0] = -inv * T
    return g


def _alpha_beta_batch(curve: Curve, etas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """alpha/beta coefficient rows; only the eta-linear part varies."""
    n = curve.order
    d = curve.coeffs
    cp = curve.derivative_coeffs()
    cpp = perp(cp)
    base_a = np.convolve(d[:, 0], cpp[:, 0]) + np.convolve(d[:, 1], cpp[:, 1])
    base_b = np.convolve(d[:, 0], cp[:, 0]) + np.convolve(d[:, 1], cp[:, 1])
    P = etas.shape[0]
    alpha = np.tile(base_a[:-1], (P, 1))
    beta = np.tile(base_b, (P, 1))
    alpha[:, :n] -= etas @ cpp.T
    beta[:, :n] -= etas @ cp.T
    return alpha, beta
