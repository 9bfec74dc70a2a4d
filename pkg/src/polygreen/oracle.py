"""Independent ground truth by adaptive quadrature.

Every integral the closed forms replace is evaluated here directly with
adaptive Gauss-Kronrod quadrature.  The Neumann integral is deliberately
taken in its log-kernel form (before integration by parts), so the Psi
encoding is validated across that identity rather than against itself.
Orders of magnitude slower than the closed forms; correctness only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import OracleFailureError
from .geometry import Cage, Curve, perp

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2**20

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0 or self.max_subdivisions <= 0:
            raise ValueError("tolerances and subdivision cap must be positive")


DEFAULT_CONFIG = QuadratureConfig()


def _poly_eval(coeffs: np.ndarray, t: float) -> np.ndarray:
    out = np.zeros(2)
    for row in coeffs[::-1]:
        out = out * t + row
    return out


def _quad(f, cfg: QuadratureConfig) -> float:
    """quad() with error-bound enforcement and limit escalation."""
    limit = min(cfg.max_subdivisions, 512)
    while True:
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                val, err = quad(f, 0.0, 1.0, epsabs=cfg.abs_tol,
                                epsrel=cfg.rel_tol, limit=limit)
            except IntegrationWarning as exc:
                if limit >= cfg.max_subdivisions:
                    raise OracleFailureError(
                        f"quadrature did not converge within {limit} subdivisions "
                        "(query point too close to the curve?)"
                    ) from exc
                limit = min(limit * 16, cfg.max_subdivisions)
                continue
        if err > max(cfg.abs_tol, cfg.rel_tol * abs(val)) * 10 and limit < cfg.max_subdivisions:
            limit = min(limit * 16, cfg.max_subdivisions)
            continue
        return val


def quad_f_kernel(curve: Curve, eta, m: int, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """integral_0^1 t^m / (2 pi ||eta - c(t)||^2) dt."""
    eta = np.asarray(eta, dtype=float)

    def f(t):
        d = curve.point(t) - eta
        return t**m / (TWO_PI * (d @ d))

    return _quad(f, cfg)


def quad_dirichlet(curve: Curve, deformed: Curve, eta,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Position-weighted kernel-derivative term, componentwise."""
    eta = np.asarray(eta, dtype=float)
    dcoef = curve.derivative_coeffs()

    def weight(t):
        d = curve.point(t) - eta
        cp = _poly_eval(dcoef, t)
        return (d @ perp(cp)) / (TWO_PI * (d @ d))

    def fx(t):
        return deformed.point(t)[0] * weight(t)

    def fy(t):
        return deformed.point(t)[1] * weight(t)

    return np.array([_quad(fx, cfg), _quad(fy, cfg)])


def quad_neumann(curve: Curve, deformed: Curve, eta,
                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Log-kernel-weighted normal-derivative term,
    -(1/2pi) integral log||c - eta|| cbar'(t)^perp dt."""
    eta = np.asarray(eta, dtype=float)
    dcoef = deformed.derivative_coeffs()

    def integrand(t):
        d = curve.point(t) - eta
        lg = 0.5 * np.log(d @ d)
        return -lg / TWO_PI * perp(_poly_eval(dcoef, t))

    def fx(t):
        return integrand(t)[0]

    def fy(t):
        return integrand(t)[1]

    return np.array([_quad(fx, cfg), _quad(fy, cfg)])


def quad_full_deform(cage: Cage, deformed_cage: Cage, eta,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Sum of both boundary terms over the whole contour."""
    out = np.zeros(2)
    for c, cbar in zip(cage.curves, deformed_cage.curves):
        out += quad_dirichlet(c, cbar, eta, cfg)
        out += quad_neumann(c, cbar, eta, cfg)
    return out
