"""Pure-Python/NumPy versions of the hot kernels.

Each function performs the same floating-point operations, in the same
order, as its counterpart in ``_kernels.pyx`` so both backends produce
bit-identical results.
"""

from __future__ import annotations

import math

import numpy as np


def assign_nearest(points, palette):
    px, py, pz = points[:, 0], points[:, 1], points[:, 2]
    labels = np.zeros(points.shape[0], dtype=np.intp)
    best = None
    for k in range(palette.shape[0]):
        dx = px - palette[k, 0]
        dy = py - palette[k, 1]
        dz = pz - palette[k, 2]
        sq = dx * dx + dy * dy + dz * dz
        if best is None:
            best = sq
            continue
        closer = sq < best
        labels[closer] = k
        best = np.where(closer, sq, best)
    return labels, best


def sq_iterate(points, palette, indices, rho, r):
    pts = points.tolist()
    pal = palette.tolist()
    n_colors = len(pal)
    exponent = r - 2.0
    for i in indices.tolist():
        x0, x1, x2 = pts[i]
        best_k = 0
        best = math.inf
        for k in range(n_colors):
            y = pal[k]
            d0 = y[0] - x0
            d1 = y[1] - x1
            d2 = y[2] - x2
            sq = d0 * d0 + d1 * d1 + d2 * d2
            if sq < best:
                best = sq
                best_k = k
        if best == 0.0:
            continue
        y = pal[best_k]
        coef = r * math.pow(math.sqrt(best), exponent)
        for c, xc in ((0, x0), (1, x1), (2, x2)):
            v = y[c] - rho * (coef * (y[c] - xc))
            y[c] = 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)
    palette[:, :] = pal
