"""Batch command-line front end.

Exit codes: 0 success, 1 check failure, 2 invalid input, 3 I/O failure.
Near-closed cages (gap below 1e-6) are snapped at load with a warning;
larger gaps are reported as validation errors.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import deformer, engine, oracle
from .errors import InvalidArgumentError, PolyGreenError, ShapeMismatchError
from .geometry import (
    Cage,
    Curve,
    elevate_degree,
    load_cage,
    validate_cage,
)

SNAP_TOL = 1e-6


def _load_valid_cage(path):
    try:
        cage = load_cage(path, snap_tol=SNAP_TOL)
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except (PolyGreenError, json.JSONDecodeError, KeyError, TypeError) as exc:
        click.echo(f"invalid cage: {exc}", err=True)
        sys.exit(2)
    report = validate_cage(cage)
    if not report.ok:
        click.echo(f"invalid cage: {report}", err=True)
        sys.exit(2)
    return cage


def _load_points(path):
    try:
        with open(path) as f:
            pts = json.load(f)
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except json.JSONDecodeError as exc:
        click.echo(f"invalid points JSON: {exc}", err=True)
        sys.exit(2)
    arr = np.asarray(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        click.echo("points JSON must be a list of [x, y]", err=True)
        sys.exit(2)
    return arr


@click.group()
def main():
    """Green-coordinate image deformation with Bezier-curve cages."""


@main.command("encode")
@click.option("--cage", "cage_path", required=True, type=click.Path())
@click.option("--points", "points_path", required=True, type=click.Path())
@click.option("--target-order", type=click.IntRange(1, 8), default=3, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def cmd_encode(cage_path, points_path, target_order, out_path):
    """Precompute a coordinate field for a point batch."""
    cage = _load_valid_cage(cage_path)
    pts = _load_points(points_path)
    keep, rejected = deformer.filter_interior(cage, pts)
    if len(rejected):
        click.echo(
            f"warning: {len(rejected)} point(s) outside the cage, excluded: "
            f"{rejected.tolist()}",
            err=True,
        )
    field = deformer.build_field(cage, pts[keep], target_order)
    try:
        deformer.save_field(field, out_path)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    click.echo(f"encoded {len(keep)} point(s) against {len(cage)} curve(s)")


@main.command("deform")
@click.option("--coords", "coords_path", required=True, type=click.Path())
@click.option("--deformed", "deformed_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
def cmd_deform(coords_path, deformed_path, out_path):
    """Apply a deformed cage to a precomputed field."""
    try:
        field = deformer.load_field(coords_path)
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except (PolyGreenError, ValueError, IndexError) as exc:
        click.echo(f"invalid field file: {exc}", err=True)
        sys.exit(2)
    try:
        cage = load_cage(deformed_path, snap_tol=SNAP_TOL)
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except PolyGreenError as exc:
        click.echo(f"invalid cage: {exc}", err=True)
        sys.exit(2)
    try:
        out = deformer.deform(field, cage)
    except ShapeMismatchError as exc:
        click.echo(f"error: {exc} (expected n_t = {field.target_order})", err=True)
        sys.exit(2)
    try:
        with open(out_path, "w") as f:
            json.dump([[float(x), float(y)] for x, y in out], f)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    click.echo(f"deformed {field.n_points} point(s)")


@main.command("warp")
@click.option("--cage", "cage_path", required=True, type=click.Path())
@click.option("--deformed", "deformed_path", required=True, type=click.Path())
@click.option("--image", "image_path", required=True, type=click.Path())
@click.option("--resolution", type=click.IntRange(2, 4096), default=64, show_default=True)
@click.option("--target-order", type=click.IntRange(1, 8), default=None,
              help="Deformed curve order (defaults to the deformed cage's own order).")
@click.option("--out", "out_path", required=True, type=click.Path())
def cmd_warp(cage_path, deformed_path, image_path, resolution, target_order, out_path):
    """Warp an image by deforming a grid embedded in the cage.

    Cage coordinates are interpreted in image pixel space (x right,
    y down); the output canvas matches the input image.
    """
    from PIL import Image, UnidentifiedImageError

    cage = _load_valid_cage(cage_path)
    deformed = _load_valid_cage(deformed_path)
    try:
        img = np.asarray(Image.open(image_path).convert("RGB"))
    except (FileNotFoundError, UnidentifiedImageError) as exc:
        click.echo(f"error: cannot read image: {exc}", err=True)
        sys.exit(3)
    curves = deformed.curves
    if target_order is not None:
        curves = tuple(elevate_degree(c, target_order) for c in curves)
    result = deformer.warp_grid(cage, Cage(curves), resolution)
    from .render import warp_image

    out = warp_image(img, result.rest_points, result.deformed_points,
                     result.triangles, img.shape[:2])
    try:
        Image.fromarray(out, "RGBA").save(out_path)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    click.echo(f"warped {len(result.triangles)} triangle(s) -> {out_path}")


@main.command("field")
@click.option("--cage", "cage_path", required=True, type=click.Path())
@click.option("--which", type=click.Choice(["phi", "psi"]), required=True)
@click.option("--curve", "curve_index", type=int, required=True)
@click.option("--coeff", "coeff_index", type=int, required=True)
@click.option("--target-order", type=click.IntRange(1, 8), default=None)
@click.option("--res", type=click.IntRange(8, 2048), default=128, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def cmd_field(cage_path, which, curve_index, coeff_index, target_order, res, out_path):
    """Render one coordinate as a signed heatmap over the cage interior."""
    from PIL import Image

    cage = _load_valid_cage(cage_path)
    if not 0 <= curve_index < len(cage):
        click.echo(f"error: curve index {curve_index} out of range [0, {len(cage) - 1}]",
                   err=True)
        sys.exit(2)
    n_t = target_order or max(c.trimmed().order for c in cage.curves)
    if not 0 <= coeff_index <= n_t:
        click.echo(f"error: coefficient index {coeff_index} above target order {n_t}",
                   err=True)
        sys.exit(2)
    lo, hi = cage.bounding_box()
    xs = np.linspace(lo[0], hi[0], res)
    ys = np.linspace(lo[1], hi[1], res)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    keep, _ = deformer.filter_interior(cage, pts, margin=1e-9)
    values = np.zeros(pts.shape[0])
    mask = np.zeros(pts.shape[0], dtype=bool)
    mask[keep] = True
    if len(keep):
        from .batch import encode_batch

        phi, psi = encode_batch(cage.curves[curve_index].trimmed(), pts[keep], n_t)
        values[keep] = (phi if which == "phi" else psi)[:, coeff_index]
    grid = values.reshape(res, res)
    gmask = mask.reshape(res, res)
    inside = grid[gmask]
    vmin = float(inside.min()) if inside.size else 0.0
    vmax = float(inside.max()) if inside.size else 0.0
    click.echo(f"{which}[{coeff_index}] of curve {curve_index}: "
               f"min {vmin:.6g}, max {vmax:.6g}")
    from .render import heatmap

    rgba = heatmap(grid, gmask)
    try:
        Image.fromarray(rgba[::-1], "RGBA").save(out_path)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)


@main.command("check")
@click.option("--cage", "cage_path", required=True, type=click.Path())
@click.option("--samples", "n_samples", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--corrupt-alpha", is_flag=True, hidden=True,
              help="Test hook: perturb the alpha table to verify the check fails.")
def cmd_check(cage_path, n_samples, seed, corrupt_alpha):
    """Compare the closed forms against adaptive quadrature."""
    cage = _load_valid_cage(cage_path)
    rng = np.random.default_rng(seed)
    lo, hi = cage.bounding_box()
    diam = cage.diameter()
    pts = []
    while len(pts) < n_samples:
        cand = rng.uniform(lo, hi, size=(4 * n_samples, 2))
        keep, _ = deformer.filter_interior(cage, cand, margin=0.05 * diam)
        pts.extend(cand[keep].tolist())
    pts = np.asarray(pts[:n_samples])

    worst = {"check": None, "error": 0.0, "config": None}
    rows = []

    def record(name, err, tol, config):
        rows.append((name, err, tol))
        if err > tol and err > worst["error"]:
            worst.update(check=name, error=err, config=config)

    # kernel check
    kerr = 0.0
    kcfg = None
    for p in pts:
        for k, c in enumerate(cage.curves):
            ct = c.trimmed()
            m_top = 3 + 2 * ct.order - 1
            F = engine.f_kernel(ct, p, m_top)
            for m in range(m_top + 1):
                ref = oracle.quad_f_kernel(ct, p, m)
                e = abs(F[m] - ref) / abs(ref)
                if e > kerr:
                    kerr, kcfg = e, {"point": p.tolist(), "curve": k, "m": m}
    record("kernel vs quadrature (rel)", kerr, 1e-8, kcfg)

    # per-curve Dirichlet / Neumann checks against a random deformation
    derr = nerr = 0.0
    dcfg = ncfg = None
    from .geometry import perp as _perp

    for p in pts[: max(1, n_samples // 5)]:
        for k, c in enumerate(cage.curves):
            ct = c.trimmed()
            n_t = ct.order
            cbar = Curve(ct.coeffs + 0.1 * diam * rng.standard_normal(ct.coeffs.shape))
            cc = engine.encode_point(ct, p, n_t)
            alpha_scale = -1.0 if corrupt_alpha else 1.0
            fd = alpha_scale * (cc.phi[:, None] * cbar.coeffs).sum(0)
            fn = (cc.psi[:, None] * _perp(cbar.coeffs)).sum(0)
            e = float(np.abs(fd - oracle.quad_dirichlet(ct, cbar, p)).max()) / diam
            if e > derr:
                derr, dcfg = e, {"point": p.tolist(), "curve": k}
            e = float(np.abs(fn - oracle.quad_neumann(ct, cbar, p)).max()) / diam
            if e > nerr:
                nerr, ncfg = e, {"point": p.tolist(), "curve": k}
    record("Dirichlet term vs quadrature (abs/diam)", derr, 1e-7, dcfg)
    record("Neumann term vs quadrature (abs/diam)", nerr, 1e-7, ncfg)

    # reproduction of the identity deformation
    n_t = max(c.trimmed().order for c in cage.curves)
    field = deformer.build_field(cage, pts, n_t, m_ceiling=max(n_t, 1))
    ident = tuple(elevate_degree(c.trimmed(), n_t) for c in cage.curves)
    out = deformer.deform(field, ident)
    rerr = float(np.abs(out - pts).max()) / diam
    record("identity reproduction (abs/diam)", rerr, 1e-6,
           {"worst_point": pts[int(np.abs(out - pts).max(1).argmax())].tolist()})

    width = max(len(r[0]) for r in rows)
    ok = True
    for name, err, tol in rows:
        status = "pass" if err <= tol else "FAIL"
        ok &= err <= tol
        click.echo(f"{name:<{width}}  {err:12.3e}  tol {tol:g}  {status}")
    if not ok:
        click.echo("worst offending configuration: "
                   + json.dumps({"check": worst["check"], **(worst["config"] or {})}),
                   err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
