"""Raster helpers for the CLI: textured triangle warping and field heatmaps."""

from __future__ import annotations

import numpy as np


def bilinear_sample(img: np.ndarray, xy: np.ndarray) -> np.ndarray:
    """Sample an (H, W, C) image at float pixel coordinates (N, 2)."""
    h, w = img.shape[:2]
    x = np.clip(xy[:, 0], 0.0, w - 1.0)
    y = np.clip(xy[:, 1], 0.0, h - 1.0)
    x0 = np.floor(x).astype(int)
    y0 = np.floor(y).astype(int)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (x - x0)[:, None]
    fy = (y - y0)[:, None]
    img = img.astype(float)
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def warp_image(img: np.ndarray, rest: np.ndarray, deformed: np.ndarray,
               triangles: np.ndarray, out_shape) -> np.ndarray:
    """Render deformed triangles, texturing from rest positions.

    ``img`` is (H, W, C) uint8; rest/deformed are in pixel coordinates
    (x right, y down).  Each output pixel inside a deformed triangle is
    mapped back to its rest position by barycentric interpolation and
    bilinearly sampled; the background stays transparent.
    """
    h, w = out_shape
    c = img.shape[2]
    out = np.zeros((h, w, c + 1), dtype=np.uint8)
    for tri in triangles:
        a, b, d = deformed[tri]
        ra, rb, rd = rest[tri]
        xmin = max(int(np.floor(min(a[0], b[0], d[0]))), 0)
        xmax = min(int(np.ceil(max(a[0], b[0], d[0]))) + 1, w)
        ymin = max(int(np.floor(min(a[1], b[1], d[1]))), 0)
        ymax = min(int(np.ceil(max(a[1], b[1], d[1]))) + 1, h)
        if xmin >= xmax or ymin >= ymax:
            continue
        gx, gy = np.meshgrid(np.arange(xmin, xmax), np.arange(ymin, ymax))
        p = np.stack([gx.ravel() + 0.0, gy.ravel() + 0.0], axis=1)
        v0 = b - a
        v1 = d - a
        den = v0[0] * v1[1] - v0[1] * v1[0]
        if abs(den) < 1e-12:
            continue
        v2 = p - a
        u = (v2[:, 0] * v1[1] - v2[:, 1] * v1[0]) / den
        v = (v0[0] * v2[:, 1] - v0[1] * v2[:, 0]) / den
        eps = 1e-9
        mask = (u >= -eps) & (v >= -eps) & (u + v <= 1 + eps)
        if not mask.any():
            continue
        u, v, p = u[mask], v[mask], p[mask]
        src = ra + u[:, None] * (rb - ra) + v[:, None] * (rd - ra)
        col = bilinear_sample(img, src)
        px = p.astype(int)
        out[px[:, 1], px[:, 0], :c] = np.clip(col, 0, 255).astype(np.uint8)
        out[px[:, 1], px[:, 0], c] = 255
    return out


def heatmap(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Signed RGBA heatmap (blue-white-red, symmetric range) of a scalar
    grid; masked-out cells are transparent."""
    import matplotlib
    from matplotlib import colors

    vmax = float(np.abs(values[mask]).max()) if mask.any() else 1.0
    vmax = vmax or 1.0
    norm = colors.Normalize(vmin=-vmax, vmax=vmax)
    rgba = matplotlib.colormaps["RdBu_r"](norm(values))
    rgba[..., 3] = np.where(mask, 1.0, 0.0)
    return (rgba * 255).astype(np.uint8)
