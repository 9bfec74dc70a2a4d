"""Regenerate the JSON cages and test image in this directory.

Run from the repository root:  python3 fixtures/gen.py
"""

import json
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))


def save(name, curves):
    with open(os.path.join(HERE, name), "w") as f:
        json.dump({"curves": curves}, f, indent=1)
    print("wrote", name)


def bez(points):
    return {"basis": "bezier", "points": [[float(x), float(y)] for x, y in points]}


def square():
    corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
    return [bez([corners[i], corners[(i + 1) % 4]]) for i in range(4)]


def quad_flower():
    """Four quadratic arcs around the unit square, bulging outward."""
    corners = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], dtype=float)
    center = np.array([0.5, 0.5])
    curves = []
    for i in range(4):
        a = corners[i]
        b = corners[(i + 1) % 4]
        mid = (a + b) / 2
        ctrl = mid + 0.6 * (mid - center)
        curves.append(bez([a, ctrl, b]))
    return curves


def _wobble_anchors(n, r0=1.0, amp=0.25, phase=0.0):
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    r = r0 * (1 + amp * np.sin(3 * th + phase))
    p = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    # tangent of the closed polyline through the anchors (central differences)
    t = np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)
    return p, t


def blob(n=8, amp=0.25, phase=0.0):
    """Closed cage of n cubic curves with C1 joints, counter-clockwise."""
    p, t = _wobble_anchors(n, amp=amp, phase=phase)
    curves = []
    for k in range(n):
        k1 = (k + 1) % n
        curves.append(bez([
            p[k],
            p[k] + t[k] / 6.0,
            p[k1] - t[k1] / 6.0,
            p[k1],
        ]))
    return curves


def scale_shift(curves, s, dx, dy):
    out = []
    for c in curves:
        pts = [[s * x + dx, s * y + dy] for x, y in c["points"]]
        out.append({"basis": "bezier", "points": pts})
    return out


def checker(path, size=128, cell=16):
    from PIL import Image

    y, x = np.mgrid[0:size, 0:size]
    tile = ((x // cell + y // cell) % 2).astype(np.uint8)
    img = np.zeros((size, size, 3), dtype=np.uint8)
    img[..., 0] = np.where(tile, 230, 40)
    img[..., 1] = np.where(tile, 120, 90)
    img[..., 2] = np.where(tile, 60, 200)
    Image.fromarray(img).save(path)
    print("wrote", os.path.basename(path))


def main():
    save("square.json", square())
    save("quad.json", quad_flower())
    save("blob.json", blob())
    # same topology and orders, visibly bent
    save("blob_bent.json", blob(amp=0.4, phase=1.1))

    # pixel-space pair for image warping on the 128x128 checker
    save("blob_pixel.json", scale_shift(blob(), 44.0, 64.0, 64.0))
    save("blob_pixel_bent.json", scale_shift(blob(amp=0.4, phase=1.1), 40.0, 64.0, 64.0))

    # deliberately broken cage: one endpoint pulled off the joint
    bad = square()
    bad[2]["points"][0][0] += 0.05
    save("open.json", bad)

    checker(os.path.join(HERE, "checker.png"))


if __name__ == "__main__":
    main()
