"""Initial palettes: uniform draws or D² (k-means++ style) seeding.

All randomness flows through :class:`numpy.random.Generator` objects built
by :func:`make_rng`, which keys a PCG64 stream on ``(seed, *stream)`` so
independent runs (one per image and palette size, say) never share draws.
"""

from __future__ import annotations

import enum

import numpy as np

from stochquant.errors import DegenerateSeedingError, InvalidInputError
from stochquant.geometry import FloatArray, PixelCloud, nearest_all


class SeedingStrategy(str, enum.Enum):
    UNIFORM = "uniform"
    D_SQUARED = "d-squared"

    @classmethod
    def parse(cls, value: "str | SeedingStrategy") -> "SeedingStrategy":
        if isinstance(value, cls):
            return value
        aliases = {"dsq": cls.D_SQUARED, "d2": cls.D_SQUARED, "kmeans++": cls.D_SQUARED}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise InvalidInputError(f"unknown seeding strategy {value!r}") from None


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for ``seed``, optionally split into a sub-stream.

    ``make_rng(42)`` and ``make_rng(42, 0, 4)`` are independent streams; the
    same arguments always reproduce the same sequence on any platform.
    """
    if not 0 <= seed < 2**64:
        raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=stream)))


def _check_k(K: int) -> None:
    if K < 1:
        raise InvalidInputError(f"palette size must be >= 1, got {K}")


def draw_index(weights: FloatArray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw of one index with probability proportional to ``weights``."""
    cdf = np.cumsum(weights)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    if idx >= len(weights):
        # u * total rounded up to total; fall back to the last massive index
        idx = int(np.flatnonzero(weights)[-1])
    return idx


def seed_uniform(cloud: PixelCloud, K: int, rng: np.random.Generator) -> FloatArray:
    """``K`` pixels drawn independently and uniformly by index, in draw order."""
    _check_k(K)
    picks = rng.integers(0, len(cloud), size=K)
    return cloud.points[picks].copy()


def seeding_weights(cloud: PixelCloud, chosen: FloatArray) -> FloatArray:
    """Probability of picking each pixel next under D² seeding.

    Proportional to the squared distance from the pixel to its nearest
    already-chosen color; pixels coinciding with a chosen color get exactly 0.

    Raises:
        DegenerateSeedingError: every pixel coincides with a chosen color.
    """
    _, sq = nearest_all(cloud.points, np.atleast_2d(chosen))
    total = sq.sum()
    if total == 0.0:
        raise DegenerateSeedingError("every pixel already coincides with a chosen color")
    return sq / total


def seed_dsquared(cloud: PixelCloud, K: int, rng: np.random.Generator) -> FloatArray:
    _check_k(K)
    points = cloud.points
    first = int(rng.integers(0, len(cloud)))
    palette = np.empty((K, 3))
    palette[0] = points[first]
    diff = points - palette[0]
    min_sq = diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1] + diff[:, 2] * diff[:, 2]
    for k in range(1, K):
        if not np.any(min_sq > 0.0):
            raise DegenerateSeedingError(
                f"cloud has only {k} distinct color(s), cannot seed {K}"
            )
        palette[k] = points[draw_index(min_sq, rng)]
        diff = points - palette[k]
        np.minimum(
            min_sq,
            diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1] + diff[:, 2] * diff[:, 2],
            out=min_sq,
        )
    return palette


def seed_palette(
    cloud: PixelCloud, K: int, strategy: "SeedingStrategy | str", rng: np.random.Generator
) -> FloatArray:
    if SeedingStrategy.parse(strategy) is SeedingStrategy.UNIFORM:
        return seed_uniform(cloud, K, rng)
    return seed_dsquared(cloud, K, rng)
