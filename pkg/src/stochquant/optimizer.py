"""Stochastic quantization: projected single-sample SGD on the transport objective.

Each iteration draws one pixel, finds its nearest quant, and moves only that
quant along the gradient of ``r * ||y - xi||^(r-2) * (y - xi)``, clamping the
result back into the unit cube.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from stochquant._backend import sq_iterate
from stochquant.errors import InvalidInputError
from stochquant.geometry import FloatArray, PixelCloud, as_palette, nearest_all
from stochquant.seeding import SeedingStrategy, seed_palette

log = logging.getLogger(__name__)

DEFAULT_RHO = 0.001
DEFAULT_R = 3.0
DEFAULT_SEED = 42
PASSES = 50
MAX_DEFAULT_ITERS = 5_000_000
# index draws are generated in fixed-size blocks so the trace cadence never
# changes which pixels are sampled
_DRAW_BLOCK = 1 << 16


def default_iters(n_pixels: int) -> int:
    """Default budget: 50 passes' worth of samples, capped at 5e6."""
    return max(1, min(PASSES * n_pixels, MAX_DEFAULT_ITERS))


@dataclass(frozen=True)
class QuantizerConfig:
    K: int
    rho: float = DEFAULT_RHO
    r: float = DEFAULT_R
    max_iters: int | None = None  # None -> default_iters(len(cloud))
    seed: int = DEFAULT_SEED
    seeding: SeedingStrategy = SeedingStrategy.D_SQUARED
    trace_every: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "seeding", SeedingStrategy.parse(self.seeding))
        if self.K < 1:
            raise InvalidInputError(f"K must be >= 1, got {self.K}")
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise InvalidInputError(f"rho must be positive, got {self.rho}")
        if not (math.isfinite(self.r) and self.r >= 2):
            raise InvalidInputError(f"r must be >= 2, got {self.r}")
        if self.max_iters is not None and self.max_iters < 1:
            raise InvalidInputError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.trace_every < 0:
            raise InvalidInputError("trace_every must be >= 0")

    def iterations_for(self, cloud: PixelCloud) -> int:
        return self.max_iters if self.max_iters is not None else default_iters(len(cloud))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seeding"] = self.seeding.value
        return d


class TracePoint(NamedTuple):
    iteration: int
    objective: float


class SQResult(NamedTuple):
    palette: FloatArray
    trace: list[TracePoint]


def objective(cloud: PixelCloud, palette: Sequence[Sequence[float]] | FloatArray, r: float) -> float:
    """Weighted mean of the r-th power distance from each pixel to its nearest quant.

    Summed with :func:`math.fsum` so the value does not depend on pixel order
    or platform summation quirks.
    """
    if r < 1:
        raise InvalidInputError(f"r must be >= 1, got {r}")
    _, sq = nearest_all(cloud.points, as_palette(palette))
    return math.fsum(cloud.weights * sq ** (r / 2.0))


def sample_gradient(
    xi: Sequence[float], palette: Sequence[Sequence[float]] | FloatArray, r: float
) -> tuple[int, FloatArray]:
    """Nearest quant index and the gradient for that quant.

    The gradient is defined as zero when ``xi`` coincides with the quant.
    """
    pal = as_palette(palette)
    x = np.asarray(xi, dtype=np.float64)
    labels, sq = nearest_all(x.reshape(1, 3), pal)
    k = int(labels[0])
    if sq[0] == 0.0:
        return k, np.zeros(3)
    diff = pal[k] - x
    return k, r * math.pow(math.sqrt(sq[0]), r - 2.0) * diff


def sq_step(
    palette: Sequence[Sequence[float]] | FloatArray, xi: Sequence[float], rho: float, r: float
) -> FloatArray:
    """One projected update; returns a new palette where only the winner moved."""
    pal = as_palette(palette).copy()
    x = np.ascontiguousarray(xi, dtype=np.float64).reshape(1, 3)
    sq_iterate(x, pal, np.zeros(1, dtype=np.int64), float(rho), float(r))
    return pal


def _index_blocks(cloud: PixelCloud, rng: np.random.Generator) -> Iterator[np.ndarray]:
    n = len(cloud)
    if cloud.is_uniform():
        while True:
            yield rng.integers(0, n, size=_DRAW_BLOCK, dtype=np.int64)
    cdf = np.cumsum(cloud.weights)
    while True:
        u = rng.random(_DRAW_BLOCK) * cdf[-1]
        yield np.minimum(np.searchsorted(cdf, u, side="right"), n - 1).astype(np.int64)


def _sample_indices(cloud: PixelCloud, rng: np.random.Generator, boundaries: list[int]) -> Iterator[np.ndarray]:
    """Yield one index array per segment ``[boundaries[j], boundaries[j+1])``."""
    blocks = _index_blocks(cloud, rng)
    buf = np.empty(0, dtype=np.int64)
    for start, stop in zip(boundaries, boundaries[1:]):
        need = stop - start
        parts = [buf]
        have = len(buf)
        while have < need:
            block = next(blocks)
            parts.append(block)
            have += len(block)
        joined = np.concatenate(parts)
        yield joined[:need]
        buf = joined[need:]


def run_sq(
    cloud: PixelCloud,
    config: QuantizerConfig,
    rng: np.random.Generator,
    init: FloatArray | None = None,
) -> SQResult:
    """Seed a palette and run the configured number of SQ iterations.

    Args:
        cloud: pixels to quantize.
        config: hyperparameters.
        rng: source of all randomness; seeding consumes it first.
        init: optional starting palette, skipping the seeding step.

    Returns:
        The trained palette and the objective trace. The trace always holds
        iteration 0 and ``max_iters``, plus every ``trace_every`` iterations.
    """
    if init is None:
        palette = seed_palette(cloud, config.K, config.seeding, rng)
    else:
        palette = as_palette(init).copy()
        if palette.shape[0] != config.K:
            raise InvalidInputError("initial palette size does not match K")
    palette = np.ascontiguousarray(palette)
    total = config.iterations_for(cloud)

    marks = [0]
    if config.trace_every:
        marks.extend(range(config.trace_every, total, config.trace_every))
    marks.append(total)

    trace = [TracePoint(0, objective(cloud, palette, config.r))]
    for stop, idx in zip(marks[1:], _sample_indices(cloud, rng, marks)):
        sq_iterate(cloud.points, palette, idx, config.rho, config.r)
        trace.append(TracePoint(stop, objective(cloud, palette, config.r)))
        log.info("iter %d objective %.9g", stop, trace[-1].objective)
    return SQResult(palette, trace)
