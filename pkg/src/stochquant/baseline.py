"""Reference quantizers: Lloyd's K-Means and an exhaustive oracle for tiny clouds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from stochquant.errors import InvalidInputError
from stochquant.geometry import FloatArray, PixelCloud, as_palette, nearest_all
from stochquant.optimizer import objective
from stochquant.seeding import seed_dsquared

MAX_ORACLE_POINTS = 12
MAX_ORACLE_K = 3


@dataclass
class BaselineResult:
    palette: FloatArray
    objective_r2: float
    iterations_used: int
    history: list[float] = field(default_factory=list)


def _weighted_centroids(cloud: PixelCloud, labels: np.ndarray, K: int) -> tuple[FloatArray, np.ndarray]:
    mass = np.bincount(labels, weights=cloud.weights, minlength=K)
    sums = np.stack(
        [np.bincount(labels, weights=cloud.weights * cloud.points[:, c], minlength=K) for c in range(3)],
        axis=1,
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        centers = sums / mass[:, None]
    return centers, mass > 0


def lloyd_kmeans(
    cloud: PixelCloud,
    K: int,
    max_iters: int,
    tol: float,
    rng: np.random.Generator,
    init: FloatArray | None = None,
) -> BaselineResult:
    """Batch Lloyd iterations from a D² seeding (or ``init``).

    Stops once no center moves more than ``tol`` in any coordinate, or after
    ``max_iters`` updates. A center left without pixels jumps to the pixel
    currently farthest from its own center.
    """
    if tol < 0:
        raise InvalidInputError("tol must be >= 0")
    if max_iters < 0:
        raise InvalidInputError("max_iters must be >= 0")
    centers = seed_dsquared(cloud, K, rng) if init is None else as_palette(init).copy()

    history = []
    used = 0
    for _ in range(max_iters):
        labels, sq = nearest_all(cloud.points, centers)
        history.append(float(np.dot(cloud.weights, sq)))
        new, filled = _weighted_centroids(cloud, labels, K)
        if not filled.all():
            far = np.argsort(-sq, kind="stable")
            for k, i in zip(np.flatnonzero(~filled), far):
                new[k] = cloud.points[i]
        used += 1
        shift = float(np.max(np.abs(new - centers)))
        centers = np.clip(new, 0.0, 1.0)
        if shift <= tol:
            break
    final = objective(cloud, centers, 2.0)
    history.append(final)
    return BaselineResult(centers, final, used, history)


def _subset_members(n: int) -> np.ndarray:
    masks = np.arange(1 << n)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(bool)


def _subset_costs(points: FloatArray, weights: FloatArray, r: float, step_tol: float = 1e-12):
    """Optimal single center and its cost for every subset of ``points``.

    r = 2 has the weighted centroid as closed form. Otherwise the cost is
    convex in the center, so a grid search over the subset's bounding box
    followed by compass-style coordinate descent (step halved on failure)
    reaches the minimum; all subsets are refined together.
    """
    n = len(points)
    member = _subset_members(n)
    w = member * weights  # (S, n)
    mass = w.sum(axis=1)
    nonempty = mass > 0
    centers = np.zeros((1 << n, 3))
    centers[nonempty] = (w @ points)[nonempty] / mass[nonempty, None]

    def cost(c: FloatArray) -> FloatArray:
        diff = points[None, :, :] - c[:, None, :]
        sq = np.einsum("snc,snc->sn", diff, diff)
        return np.sum(w * sq ** (r / 2.0), axis=1)

    if r != 2.0:
        inside = member[:, :, None]
        lo = np.where(inside, points[None], np.inf).min(axis=1)
        hi = np.where(inside, points[None], -np.inf).max(axis=1)
        lo[0] = hi[0] = 0.0  # empty subset
        best = cost(centers)
        ticks = np.linspace(0.0, 1.0, 9)
        for tx, ty, tz in itertools.product(ticks, ticks, ticks):
            cand = lo + (hi - lo) * np.array([tx, ty, tz])
            fc = cost(cand)
            better = fc < best
            centers[better] = cand[better]
            best[better] = fc[better]
        step = (hi - lo).max(axis=1) / 8.0
        for _ in range(10_000):
            active = step > step_tol
            if not active.any():
                break
            moved = np.zeros(len(step), dtype=bool)
            for c in range(3):
                for sign in (1.0, -1.0):
                    cand = centers.copy()
                    cand[:, c] += sign * step
                    fc = cost(cand)
                    better = active & (fc < best)
                    centers[better] = cand[better]
                    best[better] = fc[better]
                    moved |= better
            step = np.where(moved, step, step * 0.5)
        costs = best
    else:
        costs = cost(centers)
    costs[0] = 0.0
    return centers, costs


def brute_force_palette(cloud: PixelCloud, K: int, r: float) -> FloatArray:
    """Globally optimal palette of at most ``K`` colors, by enumeration.

    Every assignment of points to ``K`` groups is scored with the optimal
    center of each group. Palettes with fewer occupied groups are padded by
    repeating the first center, which leaves the objective unchanged.
    """
    n = len(cloud)
    if n > MAX_ORACLE_POINTS or not 1 <= K <= MAX_ORACLE_K:
        raise InvalidInputError(
            f"oracle supports <= {MAX_ORACLE_POINTS} points and 1 <= K <= {MAX_ORACLE_K}"
        )
    if r < 1:
        raise InvalidInputError("r must be >= 1")
    centers, costs = _subset_costs(cloud.points, cloud.weights, r)

    labels = np.array(list(itertools.product(range(K), repeat=n)), dtype=np.int64).reshape(-1, n)
    bits = 1 << np.arange(n)
    group_masks = np.stack([((labels == g) * bits).sum(axis=1) for g in range(K)], axis=1)
    total = costs[group_masks].sum(axis=1)
    best = group_masks[int(np.argmin(total))]

    chosen = [centers[m] for m in best if m]
    chosen += [chosen[0]] * (K - len(chosen))
    return np.clip(np.array(chosen), 0.0, 1.0)
