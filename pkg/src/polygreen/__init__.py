"""Closed-form 2D Green coordinates for cages built from Bezier curves."""

from .geometry import (
    Cage,
    Curve,
    bezier_to_monomial,
    cage_from_json,
    cage_to_json,
    elevate_degree,
    evaluate,
    load_cage,
    monomial_to_bezier,
    point_in_cage,
    save_cage,
    validate_cage,
)
from .engine import (
    AlphaBeta,
    CurveCoords,
    RootClass,
    RootSet,
    alpha_beta,
    complex_roots,
    encode_point,
    f_kernel,
    g0,
    log_distance_term,
)

__version__ = "0.1.0"
