"""Color-space primitives shared by every other module.

Pixels live in the unit RGB cube. A single color is a length-3 float64
array (or anything coercible to one); a cloud or palette is an ``(n, 3)``
array. Palette indices are 0-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy import typing as npt

from stochquant._backend import assign_nearest
from stochquant.errors import InvalidInputError

FloatArray = npt.NDArray[np.float64]

WEIGHT_SUM_TOL = 1e-9


class RawPixel(NamedTuple):
    r: int
    g: int
    b: int


class ColorPoint(NamedTuple):
    c0: float
    c1: float
    c2: float


def _as_point(p: Sequence[float]) -> FloatArray:
    a = np.asarray(p, dtype=np.float64)
    if a.shape != (3,):
        raise InvalidInputError(f"expected a 3-component color, got shape {a.shape}")
    return a


def as_palette(colors: Sequence[Sequence[float]] | FloatArray) -> FloatArray:
    """Coerce to a contiguous ``(K, 3)`` float64 array inside the unit cube."""
    a = np.ascontiguousarray(colors, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != 3:
        raise InvalidInputError(f"palette must have shape (K, 3), got {a.shape}")
    if a.shape[0] == 0:
        raise InvalidInputError("palette is empty")
    if not np.all(np.isfinite(a)) or a.min() < 0.0 or a.max() > 1.0:
        raise InvalidInputError("palette entries must lie in the unit cube")
    return a


@dataclass(frozen=True)
class PixelCloud:
    """Discrete distribution of colors: points ``(I, 3)`` with weights ``(I,)``."""

    points: FloatArray
    weights: FloatArray

    def __post_init__(self) -> None:
        points = np.ascontiguousarray(self.points, dtype=np.float64)
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3 or points.shape[0] == 0:
            raise InvalidInputError(f"points must have shape (I, 3) with I >= 1, got {points.shape}")
        if weights.shape != (points.shape[0],):
            raise InvalidInputError("weights must match the number of points")
        if not np.all(np.isfinite(points)) or points.min() < 0.0 or points.max() > 1.0:
            raise InvalidInputError("points must lie in the unit cube")
        if np.any(weights <= 0.0):
            raise InvalidInputError("weights must be strictly positive")
        if abs(math.fsum(weights) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInputError("weights must sum to 1")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points: Sequence[Sequence[float]] | FloatArray) -> "PixelCloud":
        points = np.ascontiguousarray(points, dtype=np.float64)
        n = points.shape[0] if points.ndim == 2 else 0
        return cls(points, np.full(n, 1.0 / n) if n else np.empty(0))

    def __len__(self) -> int:
        return self.points.shape[0]

    def is_uniform(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))

    def distinct_count(self) -> int:
        return np.unique(self.points, axis=0).shape[0]


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    d = _as_point(a) - _as_point(b)
    return math.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])


def normalize(raw: Sequence[int]) -> ColorPoint:
    r, g, b = (int(c) for c in raw)
    for c in (r, g, b):
        if not 0 <= c <= 255:
            raise InvalidInputError(f"channel value {c} outside [0, 255]")
    return ColorPoint(r / 255.0, g / 255.0, b / 255.0)


def normalize_array(raw: npt.ArrayLike) -> FloatArray:
    """Vectorized :func:`normalize` for uint8 rasters of any shape ``(..., 3)``."""
    return np.asarray(raw, dtype=np.float64) / 255.0


def denormalize_array(points: npt.ArrayLike) -> npt.NDArray[np.uint8]:
    # round half up, then clamp
    scaled = np.floor(np.asarray(points, dtype=np.float64) * 255.0 + 0.5)
    return np.clip(scaled, 0, 255).astype(np.uint8)


def denormalize(p: Sequence[float]) -> RawPixel:
    r, g, b = denormalize_array(_as_point(p)).tolist()
    return RawPixel(r, g, b)


def snap_to_grid(palette: FloatArray) -> FloatArray:
    """Round a palette to the nearest representable 8-bit colors."""
    return normalize_array(denormalize_array(palette))


def project_unit_cube(p: Sequence[float]) -> ColorPoint:
    a = _as_point(p)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"cannot project non-finite point {a.tolist()}")
    c = np.minimum(np.maximum(a, 0.0), 1.0)
    return ColorPoint(float(c[0]), float(c[1]), float(c[2]))


def nearest_index(x: Sequence[float], palette: Sequence[Sequence[float]] | FloatArray) -> int:
    """Index of the palette entry closest to ``x``; ties go to the lowest index."""
    pal = np.ascontiguousarray(palette, dtype=np.float64)
    if pal.ndim != 2 or pal.shape[0] == 0:
        raise InvalidInputError("palette is empty")
    labels, _ = assign_nearest(_as_point(x).reshape(1, 3), pal)
    return int(labels[0])


def nearest_all(points: FloatArray, palette: FloatArray) -> tuple[npt.NDArray[np.intp], FloatArray]:
    """Labels and squared nearest distances for every row of ``points``."""
    pal = np.ascontiguousarray(palette, dtype=np.float64)
    if pal.ndim != 2 or pal.shape[0] == 0:
        raise InvalidInputError("palette is empty")
    return assign_nearest(np.ascontiguousarray(points, dtype=np.float64), pal)
