"""Per-(curve, point) closed-form coordinate machinery.

For a curve c(t) = sum t^k c_k and a query point eta, the kernel family

    F_m = integral_0^1 t^m / (2 pi ||eta - c(t)||^2) dt

is evaluated by residue calculus: the denominator factors through the
complex polynomial a(t) = (eta_x + i eta_y) - sum t^k (c_kx + i c_ky),
whose roots (together with their conjugates) are the poles.  Simple
non-real conjugate pairs use a real-valued recurrence; real roots are
collapsed double poles; genuinely repeated roots (e.g. the query point at
a parabola's focus) use truncated Taylor series (jets) to extract the
higher-order residue.  The coordinate arrays Phi/Psi are then linear
combinations of the F_m.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import (
    EndpointSingularityError,
    InvalidArgumentError,
    OnBoundaryError,
    RootFindingError,
    WrongClassificationError,
)
from .geometry import Curve, perp

ROOT_RESIDUAL_TOL = 1e-10
CLUSTER_EPS = 1e-7          # |w_i - w_j| below this merges multiplicity groups
REAL_CLASS_TOL = 1e-9       # |Im w| below this classifies the root as real
ENDPOINT_TOL = 1e-12
TWO_PI = 2.0 * np.pi


class RootClass(enum.Enum):
    GENERAL = "general"
    REAL = "real"
    REPEATED = "repeated"


@dataclass(frozen=True)
class RootGroup:
    omega: complex
    multiplicity: int
    cls: RootClass


@dataclass(frozen=True)
class RootSet:
    """Roots of the complex curve polynomial for one (curve, point) pair.

    ``roots`` groups the n_s roots of a(t) (multiplicities sum to n_s).
    ``poles`` is the canonical pole list of the full real denominator:
    one representative per conjugate pair (Im >= 0) with its pole order,
    which is what the residue routines actually consume.
    """

    roots: tuple          # of RootGroup
    poles: tuple          # of (omega, order), Im(omega) >= 0
    normalization: float  # A = 2 pi ||c_n||^2
    order: int            # effective n_s

    def factor_list(self):
        """All linear factors (location, order) of the denominator: real
        poles once with their collapsed order, non-real poles with their
        mirror."""
        out = []
        for p, order in self.poles:
            if abs(p.imag) <= REAL_CLASS_TOL:
                out.append((complex(p.real), order))
            else:
                out.append((p, order))
                out.append((complex(np.conj(p)), order))
        return out

    def h_excluding(self, w: complex, drop: int) -> complex:
        """Evaluate the denominator product at w with ``drop`` orders
        removed at w itself and at conj(w) (when distinct)."""
        val = 1.0 + 0.0j
        wc = complex(np.conj(w))
        distinct_conj = abs(w.imag) > REAL_CLASS_TOL
        for q, order in self.factor_list():
            o = order
            if abs(q - w) < CLUSTER_EPS:
                o -= drop
            elif distinct_conj and abs(q - wc) < CLUSTER_EPS:
                o -= drop
            if o > 0:
                val *= (w - q) ** o
        return val


# --- root finding ---------------------------------------------------------


def aberth_roots(coeffs: np.ndarray, max_iter=80) -> np.ndarray:
    """Simultaneous Aberth-Ehrlich iteration, batched over rows.

    ``coeffs`` has shape (P, n+1), ascending powers, nonzero leading
    column.  Rows that fail to converge fall back to companion-matrix
    eigenvalues.  Roots are returned unpolished.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    P, n1 = coeffs.shape
    n = n1 - 1
    a = coeffs / coeffs[:, -1:]
    radius = 1.0 + np.abs(a[:, :-1]).max(axis=1)
    k = np.arange(n)
    z = radius[:, None] * np.exp(2j * np.pi * (k[None, :] + 0.4) / n + 0.25j)
    scale = np.abs(coeffs).sum(axis=1)

    dcoef = coeffs[:, 1:] * np.arange(1, n + 1)
    done = np.zeros(P, dtype=bool)
    for _ in range(max_iter):
        p = _horner(coeffs, z)
        dp = _horner(dcoef, z)
        resid = np.abs(p).max(axis=1)
        done = resid <= 1e-14 * np.maximum(scale, 1e-300) * np.maximum(np.abs(z), 1.0).max(axis=1) ** n
        if done.all():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / np.where(dp == 0, 1e-300, dp)
            diff = z[:, :, None] - z[:, None, :]
            idx = np.arange(n)
            diff[:, idx, idx] = 1.0
            s = (1.0 / diff).sum(axis=2) - 1.0
            corr = w / (1.0 - w * s)
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z = z - np.where(done[:, None], 0.0, corr)

    if not done.all():
        for i in np.nonzero(~done)[0]:
            z[i] = np.roots(coeffs[i, ::-1])
    return z


def _horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    # coeffs (P, k) ascending; z (P, n) -> values (P, n)
    out = np.zeros_like(z)
    for j in range(coeffs.shape[1] - 1, -1, -1):
        out = out * z + coeffs[:, j : j + 1]
    return out


def newton_polish(coeffs: np.ndarray, z: np.ndarray, steps=2) -> np.ndarray:
    """Refine roots by Newton steps, keeping a step only if the residual
    does not grow (repeated roots make Newton oscillate)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    dcoef = coeffs[:, 1:] * np.arange(1, coeffs.shape[1] - 1 + 1)
    for _ in range(steps):
        p = _horner(coeffs, z)
        dp = _horner(dcoef, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / dp
        step = np.where(np.isfinite(step), step, 0.0)
        z_new = z - step
        better = np.abs(_horner(coeffs, z_new)) <= np.abs(p)
        z = np.where(better, z_new, z)
    return z


def curve_polynomial(curve: Curve, eta) -> np.ndarray:
    """Ascending complex coefficients of a(t) = eta_c - sum t^k c_k^c."""
    c = curve.trimmed()
    cc = c.complex_coeffs()
    a = -cc
    a[0] += eta[0] + 1j * eta[1]
    return a


def _cluster(values, eps):
    """Greedy chaining cluster; returns list of (mean, count)."""
    vals = sorted(values, key=lambda w: (w.real, w.imag))
    groups = []
    for w in vals:
        for g in groups:
            if any(abs(w - u) < eps for u in g):
                g.append(w)
                break
        else:
            groups.append([w])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def complex_roots(curve: Curve, eta, cluster_eps=CLUSTER_EPS,
                  real_tol=REAL_CLASS_TOL) -> RootSet:
    """Find, polish, cluster, and classify the roots of a(t).

    Raises :class:`OnBoundaryError` if a real root lands in [0, 1]
    (i.e. eta lies on the curve) and :class:`RootFindingError` if the
    polished residual stays above tolerance.
    """
    c = curve.trimmed()
    a = curve_polynomial(c, eta)
    n = len(a) - 1
    if n == 1:
        roots = np.array([[-a[0] / a[1]]])
    elif n == 2:
        roots = _quadratic_roots(a[None, :])
    else:
        roots = aberth_roots(a[None, :])
    roots = newton_polish(a[None, :], roots)[0]

    scale = float(np.abs(a).sum())
    resid = np.abs(_horner(a[None, :], roots[None, :]))[0]
    bound = ROOT_RESIDUAL_TOL * scale * np.maximum(np.abs(roots), 1.0) ** n
    # double roots are found with O(sqrt(eps)) placement error; the residual
    # there is quadratically small, so this bound stays honest
    if np.any(resid > np.maximum(bound, 1e3 * np.finfo(float).tiny)):
        raise RootFindingError(
            f"root residual {resid.max():.3e} above tolerance for scale {scale:.3e}",
            coeffs=a,
        )

    for w in roots:
        if abs(w.imag) < real_tol and -1e-9 <= w.real <= 1 + 1e-9:
            raise OnBoundaryError(f"query point lies on the curve at t = {w.real:.6g}")

    groups = []
    for w, mult in _cluster(roots, cluster_eps):
        if abs(w.imag) < real_tol:
            cls = RootClass.REAL
            w = complex(w.real, 0.0)
        elif mult > 1:
            cls = RootClass.REPEATED
        else:
            cls = RootClass.GENERAL
        groups.append(RootGroup(w, mult, cls))

    # canonical pole list over the full conjugate-closed multiset
    multiset = []
    for g in groups:
        multiset.extend([g.omega] * g.multiplicity)
        multiset.extend([np.conj(g.omega)] * g.multiplicity)
    poles = []
    for w, order in _cluster(multiset, cluster_eps):
        if w.imag < -real_tol:
            continue
        if abs(w.imag) < real_tol:
            w = complex(w.real, 0.0)
        poles.append((w, order))

    lead = c.complex_coeffs()[-1]
    return RootSet(
        roots=tuple(groups),
        poles=tuple(poles),
        normalization=TWO_PI * abs(lead) ** 2,
        order=n,
    )


def _quadratic_roots(a: np.ndarray) -> np.ndarray:
    """Stable complex quadratic roots of a0 + a1 t + a2 t^2, batched."""
    a0, a1, a2 = a[:, 0], a[:, 1], a[:, 2]
    disc = np.sqrt(a1 * a1 - 4 * a0 * a2)
    # pick the sign that avoids cancellation in a1 + disc
    flip = (np.conj(a1) * disc).real < 0
    disc = np.where(flip, -disc, disc)
    q = -0.5 * (a1 + disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = q / a2
        r2 = np.where(q != 0, a0 / np.where(q == 0, 1, q), -a1 / a2 - r1)
    return np.stack([r1, r2], axis=1)


# --- g0 and series (jet) utilities ---------------------------------------


def g0(omega: complex) -> complex:
    """log(1 - 1/omega) on the principal branch, in a form stable near
    the real axis.  Real for real omega outside [0, 1]."""
    w = complex(omega)
    r2 = w.real * w.real + w.imag * w.imag
    if r2 < ENDPOINT_TOL**2 or abs(w - 1.0) < ENDPOINT_TOL:
        raise EndpointSingularityError(
            "g0 is singular at 0 and 1 (query point at a curve extremity)"
        )
    re = 0.5 * np.log1p((1.0 - 2.0 * w.real) / r2)
    im = np.arctan2(w.imag, r2 - w.real)
    return complex(re, im)


def _g0_vec(w: np.ndarray) -> np.ndarray:
    r2 = w.real**2 + w.imag**2
    return 0.5 * np.log1p((1.0 - 2.0 * w.real) / r2) + 1j * np.arctan2(w.imag, r2 - w.real)


# above this |omega| the forward W/E recurrences amplify rounding error
# like |omega|^m; switch to the inverse-power tail series, which only adds
# terms of one sign scale and is stable for |omega| > 1
SERIES_OMEGA = 1.5


def _g_tail(w: complex, m_top: int, n_terms: int = 220) -> np.ndarray:
    """g_0..g_{m_top} via the tail series g_m = -sum_j w^-j / (m+j),
    valid and stable for |w| > 1 (each T(m) = 1/m + T(m+1)/w)."""
    inv = 1.0 / w
    start = max(m_top, 1)
    term = 1.0 + 0.0j
    s = 0.0 + 0.0j
    for j in range(n_terms):
        t = term / (start + j)
        s += t
        if abs(t) < 1e-18 * abs(s):
            break
        term *= inv
    T = np.empty(max(m_top, 1) + 1, dtype=complex)
    T[start] = s
    for m in range(start - 1, 0, -1):
        T[m] = 1.0 / m + inv * T[m + 1]
    g = np.empty(m_top + 1, dtype=complex)
    g[0] = -inv * T[1]
    for m in range(1, m_top + 1):
        g[m] = -T[m]
    return g


def _gp_tail(x: float, m_top: int, n_terms: int = 220) -> np.ndarray:
    """Derivatives g_m'(x) = sum_j j x^-(j+1) / (m+j) for real |x| > 1."""
    inv = 1.0 / x
    gp = np.empty(m_top + 1)
    gp[0] = 1.0 / (x * x - x)
    for m in range(1, m_top + 1):
        term = inv * inv  # j = 1 contribution carries x^-2
        s = 0.0
        for j in range(1, n_terms):
            t = j * term / (m + j)
            s += t
            if abs(t) < 1e-18 * abs(s):
                break
            term *= inv
        gp[m] = s
    return gp


def _series_mul(a, b, n):
    return np.convolve(a, b)[:n]


def _series_inv(a, n):
    """Reciprocal power series to n terms; a[0] != 0."""
    inv = np.zeros(n, dtype=complex)
    inv[0] = 1.0 / a[0]
    for k in range(1, n):
        acc = 0.0
        for j in range(1, min(k, len(a) - 1) + 1):
            acc += a[j] * inv[k - j]
        inv[k] = -acc / a[0]
    return inv


def _series_pow_shift(w0, k, n):
    """Taylor coefficients of (w0 + e)^k to n terms."""
    out = np.zeros(n, dtype=complex)
    for j in range(min(k, n - 1) + 1):
        out[j] = comb(k, j) * w0 ** (k - j)
    return out


def g_series(m: int, w0: complex, n: int) -> np.ndarray:
    """Taylor coefficients at w0 of
    g_m(w) = w^m (log(1 - 1/w) + sum_{k=1}^{m-1} 1/(k w^k)), to n terms.

    The partial-sum bound m-1 is the variant whose residue sums agree with
    the kernel integral (the difference term has vanishing residue sum).
    """
    # L = log(1 - 1/w): L' = 1/(w^2 - w)
    L = np.zeros(n, dtype=complex)
    L[0] = g0(w0)
    if n > 1:
        q = np.array([w0 * w0 - w0, 2 * w0 - 1, 1.0], dtype=complex)
        Lp = _series_inv(q, n - 1)
        L[1:] = Lp / np.arange(1, n)
    s = L
    if m >= 2:
        invw = _series_inv(np.array([w0, 1.0], dtype=complex), n)
        pk = invw.copy()
        acc = np.zeros(n, dtype=complex)
        for k in range(1, m):
            acc += pk / k
            if k < m - 1:
                pk = _series_mul(pk, invw, n)
        s = s + acc
    return _series_mul(_series_pow_shift(w0, m, n), s, n)


def _h_series(rootset: RootSet, w0: complex, drop: int, n: int) -> np.ndarray:
    """Taylor series at w0 of the full denominator product with ``drop``
    orders removed at the pole(s) coinciding with w0."""
    s = np.array([1.0 + 0j])
    for p, order in rootset.poles:
        mirrors = ((p, order),) if abs(p.imag) <= REAL_CLASS_TOL else ((p, order), (np.conj(p), order))
        for q, oq in mirrors:
            o = oq - (drop if abs(q - w0) < CLUSTER_EPS else 0)
            for _ in range(max(o, 0)):
                s = _series_mul(s, np.array([w0 - q, 1.0], dtype=complex), n)
    if len(s) < n:
        s = np.pad(s, (0, n - len(s)))
    return s


def _residue_at(rootset: RootSet, w0: complex, order: int, m: int) -> complex:
    """Residue of g_m / h at a pole of the given order via jets."""
    g = g_series(m, w0, order)
    hs = _h_series(rootset, w0, order, order)
    return _series_mul(g, _series_inv(hs, order), order)[order - 1]


# --- residue branches -----------------------------------------------------


def e_sequence(rootset: RootSet, root_index: int, m_max: int) -> np.ndarray:
    """Conjugate-pair contribution to A*F_m for a simple non-real root,
    via the W/E recurrences."""
    grp = rootset.roots[root_index]
    if grp.cls is not RootClass.GENERAL:
        raise WrongClassificationError(
            f"root {root_index} is {grp.cls.value}; e_sequence handles simple non-real roots"
        )
    w = grp.omega
    h_i = rootset.h_excluding(w, 1)
    return _e_general(w, h_i, m_max)


def _e_general(w: complex, h_i: complex, m_max: int) -> np.ndarray:
    if abs(w) >= SERIES_OMEGA:
        g = _g_tail(w, m_max)
        return (g / h_i).imag / w.imag
    E = np.empty(m_max + 1)
    W = g0(w) / h_i
    E[0] = W.imag / w.imag
    const = (w / h_i).imag / w.imag
    for m in range(m_max):
        E[m + 1] = w.real * E[m] + W.real + (const / m if m >= 1 else 0.0)
        W = w * W if m == 0 else w * (W + 1.0 / (m * h_i))
    return E


def e_sequence_real(rootset: RootSet, root_index: int, m_max: int) -> np.ndarray:
    """Contribution of a real root (conjugate-collapsed double pole).

    All quantities are real; the general recurrence's 1/Im term is
    replaced by its limit, the derivative of w/h^i at the root.
    """
    grp = rootset.roots[root_index]
    if grp.cls is not RootClass.REAL:
        raise WrongClassificationError(
            f"root {root_index} is {grp.cls.value}; e_sequence_real handles real roots"
        )
    if grp.multiplicity > 1:
        # real repeated root: fall through to the jet machinery
        return np.array([e_repeated(rootset, root_index, m) for m in range(m_max + 1)])
    x = grp.omega.real
    if -1e-9 <= x <= 1 + 1e-9:
        raise OnBoundaryError("real root inside [0, 1]: query point on the curve")
    return _e_real_pole(rootset, x, m_max)


def e_repeated(rootset: RootSet, root_index: int, m: int) -> float:
    """Contribution to A*F_m of a repeated root via series residues."""
    grp = rootset.roots[root_index]
    if grp.multiplicity <= 1:
        raise WrongClassificationError(
            f"root {root_index} has multiplicity 1; e_repeated needs a repeated root"
        )
    w = grp.omega
    if abs(w.imag) <= REAL_CLASS_TOL:
        x = complex(w.real)
        order = 2 * grp.multiplicity
        return float(_residue_at(rootset, x, order, m).real)
    res = _residue_at(rootset, w, grp.multiplicity, m)
    return float(2.0 * res.real)


# --- kernel, alpha/beta, encoding ----------------------------------------


def f_kernel(curve: Curve, eta, m_max: int) -> np.ndarray:
    """Closed-form F_0..F_{m_max}, routing each pole to its branch."""
    rs = complex_roots(curve, eta)
    return f_kernel_from_roots(rs, m_max)


def f_kernel_from_roots(rootset: RootSet, m_max: int) -> np.ndarray:
    E = np.zeros(m_max + 1)
    for w, order in rootset.poles:
        if abs(w.imag) <= REAL_CLASS_TOL:
            x = w.real
            if -1e-9 <= x <= 1 + 1e-9:
                raise OnBoundaryError("pole inside [0, 1]: query point on the curve")
            if order == 2:
                E += _e_real_pole(rootset, x, m_max)
            else:
                for m in range(m_max + 1):
                    E[m] += _residue_at(rootset, complex(x), order, m).real
        elif order == 1:
            h_i = rootset.h_excluding(w, 1)
            E += _e_general(w, h_i, m_max)
        else:
            for m in range(m_max + 1):
                E[m] += 2.0 * _residue_at(rootset, w, order, m).real
    return E / rootset.normalization


def _e_real_pole(rootset: RootSet, x: float, m_max: int) -> np.ndarray:
    """Order-2 real pole contribution: E_m is the residue of g_m/h^i as
    a double pole, i.e. the derivative (g_m/h^i)'(x), carried by the same
    W recurrence plus its derivative D."""
    # both coincident linear factors removed at x
    h_i = rootset.h_excluding(complex(x), 2).real
    hp = (h_i * sum(
        o / (x - q)
        for q, o in rootset.factor_list()
        if abs(q - x) > CLUSTER_EPS
    )).real
    if abs(x) >= SERIES_OMEGA:
        g = _g_tail(complex(x), m_max).real
        gp = _gp_tail(x, m_max)
        return gp / h_i - g * hp / h_i**2
    gv = g0(complex(x)).real
    gd = 1.0 / (x * x - x)
    E = np.empty(m_max + 1)
    W = gv / h_i
    D = gd / h_i - gv * hp / h_i**2
    E[0] = D
    inv_h, dinv_h = 1.0 / h_i, -hp / h_i**2
    for m in range(m_max):
        if m == 0:
            W, D = x * W, W + x * D
        else:
            W, D = x * (W + inv_h / m), W + inv_h / m + x * (D + dinv_h / m)
        E[m + 1] = D
    return E


@dataclass(frozen=True)
class AlphaBeta:
    """Coefficients of (c(t)-eta) . c'(t)^perp and (c(t)-eta) . c'(t)."""

    alpha: np.ndarray  # length 2 n_s - 1
    beta: np.ndarray   # length 2 n_s


def alpha_beta(curve: Curve, eta) -> AlphaBeta:
    """Numerator polynomial coefficients by direct convolution.

    Works for any order; for quadratics it reproduces the standard
    closed-form tables term by term.
    """
    c = curve.trimmed()
    d = c.coeffs.copy()
    d[0] -= np.asarray(eta, dtype=float)
    cp = c.derivative_coeffs()
    cpp = perp(cp)
    alpha = np.convolve(d[:, 0], cpp[:, 0]) + np.convolve(d[:, 1], cpp[:, 1])
    beta = np.convolve(d[:, 0], cp[:, 0]) + np.convolve(d[:, 1], cp[:, 1])
    # top alpha coefficient is c_n . (n c_n)^perp = 0 identically
    return AlphaBeta(alpha=alpha[:-1], beta=beta)


def log_distance_term(curve: Curve, eta) -> float:
    """-(1/2pi) log ||c(1) - eta||, the boundary term of the Neumann
    integration by parts (c(1) = sum of all monomial coefficients)."""
    end = curve.coeffs.sum(axis=0)
    dist = float(np.linalg.norm(end - np.asarray(eta, dtype=float)))
    if dist < ENDPOINT_TOL:
        raise EndpointSingularityError("query point coincides with the curve endpoint")
    return -np.log(dist) / TWO_PI


@dataclass(frozen=True)
class CurveCoords:
    """Phi/Psi coordinate arrays of one query point against one curve."""

    phi: np.ndarray
    psi: np.ndarray
    source_order: int
    target_order: int


def encode_point(curve: Curve, eta, n_t: int) -> CurveCoords:
    """Encode a rest position into Phi[0..n_t], Psi[0..n_t] (Psi[0] = 0).

    Consumes F_m only for m up to n_t + 2 n_s - 1.
    """
    if n_t < 1:
        raise InvalidArgumentError("target order must be >= 1")
    c = curve.trimmed()
    n_s = c.order
    m_top = n_t + 2 * n_s - 1
    F = f_kernel(c, eta, m_top)
    ab = alpha_beta(c, eta)
    delta = log_distance_term(c, eta)

    phi = np.empty(n_t + 1)
    psi = np.empty(n_t + 1)
    for m in range(n_t + 1):
        phi[m] = float(ab.alpha @ F[m : m + 2 * n_s - 1])
        psi[m] = float(ab.beta @ F[m : m + 2 * n_s]) + delta
    psi[0] = 0.0
    return CurveCoords(phi=phi, psi=psi, source_order=n_s, target_order=n_t)
