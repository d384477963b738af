"""End-to-end runs behind the CLI: compress one image, compare against
Lloyd, and sweep palette sizes over a set of images."""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from stochquant.baseline import lloyd_kmeans
from stochquant.errors import DegenerateSeedingError, ImageIOError, InvalidInputError
from stochquant.geometry import FloatArray, PixelCloud, normalize_array, snap_to_grid
from stochquant.optimizer import QuantizerConfig, objective, run_sq
from stochquant.pipeline import (
    IndexedImage,
    RawImage,
    build_cloud,
    distinct_colors,
    encode_indexed_png,
    file_size,
    load_image,
    map_to_palette,
    mse,
    transport_value,
)
from stochquant.report import QuantizationReport, palette_hex
from stochquant.seeding import make_rng, seed_palette

log = logging.getLogger(__name__)

TABLE1_COLORS = (4, 8, 12, 24, 36)


@dataclass
class _Prepared:
    image: RawImage
    cloud: PixelCloud
    distinct: np.ndarray
    K: int
    exact: FloatArray | None  # palette that reproduces the image losslessly


def _prepare(image: RawImage, K: int, strict: bool) -> _Prepared:
    if not 1 <= K <= 256:
        raise InvalidInputError(f"palette size must be in [1, 256], got {K}")
    distinct = distinct_colors(image)
    exact = None
    if len(distinct) <= K:
        if strict and len(distinct) < K:
            raise DegenerateSeedingError(
                f"image has {len(distinct)} distinct colors, fewer than the {K} requested"
            )
        # the image's own colors are already an optimal palette
        exact = normalize_array(distinct)
        K = len(distinct)
    return _Prepared(image, build_cloud(image), distinct, K, exact)


def _hyperparameters(config: QuantizerConfig, iters: int) -> dict[str, Any]:
    return {
        "rho": config.rho,
        "r": config.r,
        "seed": config.seed,
        "iters": iters,
        "seeding": config.seeding.value,
        "trace_every": config.trace_every,
    }


def compress_image(
    input_path: str,
    config: QuantizerConfig,
    out: str | Path | io.BytesIO | None = None,
    *,
    image_index: int = 0,
    strict: bool = False,
) -> tuple[QuantizationReport, IndexedImage]:
    """Quantize one image and write the indexed PNG to ``out`` (memory if None).

    ``config.K`` is lowered to the image's distinct color count when it
    exceeds it, unless ``strict`` is set, in which case that raises
    :class:`DegenerateSeedingError`.
    """
    start = time.perf_counter()
    image = load_image(input_path)
    prep = _prepare(image, config.K, strict)
    cfg = replace(config, K=prep.K)
    rng = make_rng(config.seed, image_index, config.K)
    palette, trace = run_sq(prep.cloud, cfg, rng, init=prep.exact)

    stored = snap_to_grid(palette)
    indexed = map_to_palette(image, stored)
    compressed = encode_indexed_png(indexed, io.BytesIO() if out is None else out)
    report = QuantizationReport(
        input_path=str(input_path),
        width=image.width,
        height=image.height,
        distinct_colors_before=len(prep.distinct),
        K=prep.K,
        requested_K=config.K,
        hyperparameters=_hyperparameters(cfg, cfg.iterations_for(prep.cloud)),
        palette_hex=palette_hex(stored),
        final_objective=objective(prep.cloud, stored, cfg.r),
        transport_value=transport_value(prep.cloud, stored, cfg.r),
        mse=mse(image, indexed.reconstruct()),
        original_bytes=file_size(input_path),
        compressed_bytes=compressed,
        wall_time_ms=(time.perf_counter() - start) * 1e3,
        trace=trace,
    )
    return report, indexed


def compare_baseline(
    input_path: str,
    config: QuantizerConfig,
    *,
    lloyd_iters: int = 300,
    tol: float = 1e-9,
    strict: bool = False,
) -> dict[str, Any]:
    """Run SQ and Lloyd from the same initial palette and report both."""
    image = load_image(input_path)
    prep = _prepare(image, config.K, strict)
    cfg = replace(config, K=prep.K)
    rng = make_rng(config.seed, 0, config.K)
    init = prep.exact if prep.exact is not None else seed_palette(prep.cloud, cfg.K, cfg.seeding, rng)

    def summarize(palette: FloatArray, iterations: int, elapsed: float) -> dict[str, Any]:
        stored = snap_to_grid(palette)
        return {
            "palette_hex": palette_hex(stored),
            "mse": mse(image, map_to_palette(image, stored).reconstruct()),
            "objective_r2": objective(prep.cloud, stored, 2.0),
            "transport_value": transport_value(prep.cloud, stored, cfg.r),
            "iterations": iterations,
            "wall_time_ms": elapsed * 1e3,
        }

    iters = cfg.iterations_for(prep.cloud)
    t0 = time.perf_counter()
    sq_palette, _ = run_sq(prep.cloud, cfg, rng, init=init)
    sq_time = time.perf_counter() - t0

    t0 = time.perf_counter()
    lloyd = lloyd_kmeans(prep.cloud, cfg.K, lloyd_iters, tol, rng, init=init)
    lloyd_time = time.perf_counter() - t0

    return {
        "input_path": str(input_path),
        "width": image.width,
        "height": image.height,
        "distinct_colors_before": len(prep.distinct),
        "K": prep.K,
        "requested_K": config.K,
        "hyperparameters": _hyperparameters(cfg, iters),
        "lloyd_max_iters": lloyd_iters,
        "lloyd_tol": tol,
        "initial_palette_hex": palette_hex(init),
        "sq": summarize(sq_palette, iters, sq_time),
        "lloyd": summarize(lloyd.palette, lloyd.iterations_used, lloyd_time),
        # Lloyd time over SQ time; > 1 means SQ was faster
        "speed_ratio": lloyd_time / sq_time if sq_time > 0 else None,
    }


@dataclass
class BenchmarkTable:
    colors: list[int]
    images: list[str]
    cells: list[list[dict[str, Any]]]  # [row per K][column per image]
    metadata: dict[str, Any]
    reports: dict[tuple[int, int], QuantizationReport] = field(default_factory=dict, repr=False)
    errors: list[BaseException] = field(default_factory=list, repr=False)

    @property
    def flags(self) -> list[str]:
        """Columns where MSE increases with palette size."""
        out = []
        for j, name in enumerate(self.images):
            col = [(k, row[j].get("mse")) for k, row in zip(self.colors, self.cells)]
            col = [(k, v) for k, v in col if v is not None]
            for (k0, a), (k1, b) in zip(col, col[1:]):
                if b > a:
                    out.append(f"{name}: mse rises from K={k0} ({a:.6g}) to K={k1} ({b:.6g})")
        return out

    def all_failed(self) -> bool:
        return all("error" in c for row in self.cells for c in row)

    def to_dict(self) -> dict[str, Any]:
        return {
            "colors": self.colors,
            "images": self.images,
            "cells": self.cells,
            "metadata": self.metadata,
            "flags": self.flags,
        }

    @staticmethod
    def _fmt(cell: dict[str, Any]) -> str:
        return repr(cell["mse"]) if "mse" in cell else f"error: {cell['error']}"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["K", *self.images])
        for k, row in zip(self.colors, self.cells):
            writer.writerow([k, *(self._fmt(c) for c in row)])
        return buf.getvalue()

    def to_markdown(self) -> str:
        m = self.metadata
        lines = [
            f"MSE by palette size (rho={m['rho']}, r={m['r']}, seed={m['seed']}, "
            f"iters={m['iters'] if m['iters'] is not None else 'default'}, seeding={m['seeding']})",
            "",
            "| K | " + " | ".join(self.images) + " |",
            "|---|" + "---|" * len(self.images),
        ]
        for k, row in zip(self.colors, self.cells):
            cells = [f"{c['mse']:.4f}" if "mse" in c else f"error: {c['error']}" for c in row]
            lines.append(f"| {k} | " + " | ".join(c.replace("|", "\\|") for c in cells) + " |")
        if self.flags:
            lines += ["", *(f"- warning: {f}" for f in self.flags)]
        return "\n".join(lines) + "\n"


def _column_names(paths: Sequence[str]) -> list[str]:
    names = [Path(p).name for p in paths]
    if len(set(names)) == len(names):
        return names
    return [f"{i}:{n}" for i, n in enumerate(names)]


def _bench_cell(args: tuple[str, QuantizerConfig, int]) -> QuantizationReport | BaseException:
    path, config, index = args
    try:
        report, _ = compress_image(path, config, None, image_index=index)
        return report
    except (ImageIOError, InvalidInputError, DegenerateSeedingError) as exc:
        return exc


def run_benchmark(
    paths: Sequence[str],
    colors: Sequence[int],
    base: QuantizerConfig,
    *,
    jobs: int = 1,
) -> BenchmarkTable:
    """Compress every image at every palette size.

    Each cell draws from its own stream keyed on (seed, image index, K), so
    the table does not depend on ``jobs``.
    """
    if not paths:
        raise InvalidInputError("no input images")
    if not colors:
        raise InvalidInputError("no palette sizes")
    tasks = [(p, replace(base, K=k), j) for k in colors for j, p in enumerate(paths)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_cell, tasks))
    else:
        results = [_bench_cell(t) for t in tasks]

    table = BenchmarkTable(
        colors=list(colors),
        images=_column_names(paths),
        cells=[],
        metadata={
            "rho": base.rho,
            "r": base.r,
            "seed": base.seed,
            "iters": base.max_iters,
            "seeding": base.seeding.value,
        },
    )
    it = iter(results)
    for k in colors:
        row = []
        for j in range(len(paths)):
            res = next(it)
            if isinstance(res, BaseException):
                log.warning("cell K=%d image=%s failed: %s", k, paths[j], res)
                row.append({"error": str(res)})
                table.errors.append(res)
            else:
                row.append({"mse": res.mse})
                table.reports[(k, j)] = res
        table.cells.append(row)
    for f in table.flags:
        log.warning("monotonicity: %s", f)
    return table
