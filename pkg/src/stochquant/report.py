"""Report records emitted by the CLI and their JSON schemas."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Any

import numpy as np

from stochquant.geometry import FloatArray, denormalize_array
from stochquant.optimizer import TracePoint
from stochquant.pipeline import CompressionMetrics

# fields that vary run to run and are excluded from determinism checks
TIMING_FIELDS = frozenset({"wall_time_ms", "speed_ratio"})


def palette_hex(palette: FloatArray) -> list[str]:
    return ["#{:02x}{:02x}{:02x}".format(*rgb) for rgb in denormalize_array(np.atleast_2d(palette)).tolist()]


@dataclass
class QuantizationReport:
    input_path: str
    width: int
    height: int
    distinct_colors_before: int
    K: int
    requested_K: int
    hyperparameters: dict[str, Any]
    palette_hex: list[str]
    final_objective: float
    transport_value: float
    mse: float
    original_bytes: int
    compressed_bytes: int
    wall_time_ms: float
    trace: list[TracePoint] = field(default_factory=list)

    @property
    def metrics(self) -> CompressionMetrics:
        return CompressionMetrics(
            mse=self.mse,
            transport_value=self.transport_value,
            original_bytes=self.original_bytes,
            compressed_bytes=self.compressed_bytes,
            distinct_colors_before=self.distinct_colors_before,
            palette_size_after=len(self.palette_hex),
        )

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["trace"] = [{"iteration": t.iteration, "objective": t.objective} for t in self.trace]
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict())


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def strip_timing(obj: Any) -> Any:
    """Copy of a report structure with timing fields removed, recursively."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_FIELDS}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def load_schema(name: str) -> dict[str, Any]:
    """Load one of the shipped schemas: ``report``, ``baseline`` or ``benchmark``."""
    text = resources.files("stochquant").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)
