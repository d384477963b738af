"""Color quantization by stochastic quantization.

A K-color palette is fitted to an image's pixel distribution with
single-sample projected SGD on the transport objective, seeded by D²
sampling; the image is then remapped to the palette and stored as an
indexed PNG.
"""

from stochquant._backend import BACKEND
from stochquant.baseline import BaselineResult, brute_force_palette, lloyd_kmeans
from stochquant.errors import DegenerateSeedingError, ImageIOError, InvalidInputError
from stochquant.geometry import (
    ColorPoint,
    PixelCloud,
    RawPixel,
    denormalize,
    distance,
    nearest_index,
    normalize,
    project_unit_cube,
)
from stochquant.optimizer import QuantizerConfig, TracePoint, objective, run_sq, sample_gradient, sq_step
from stochquant.pipeline import (
    CompressionMetrics,
    IndexedImage,
    RawImage,
    build_cloud,
    count_distinct_colors,
    encode_indexed_png,
    load_image,
    map_to_palette,
    mse,
    transport_value,
)
from stochquant.seeding import SeedingStrategy, make_rng, seed_dsquared, seed_uniform, seeding_weights

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BaselineResult",
    "ColorPoint",
    "CompressionMetrics",
    "DegenerateSeedingError",
    "ImageIOError",
    "IndexedImage",
    "InvalidInputError",
    "PixelCloud",
    "QuantizerConfig",
    "RawImage",
    "RawPixel",
    "SeedingStrategy",
    "TracePoint",
    "brute_force_palette",
    "build_cloud",
    "count_distinct_colors",
    "denormalize",
    "distance",
    "encode_indexed_png",
    "lloyd_kmeans",
    "load_image",
    "make_rng",
    "map_to_palette",
    "mse",
    "nearest_index",
    "normalize",
    "objective",
    "project_unit_cube",
    "run_sq",
    "sample_gradient",
    "seed_dsquared",
    "seed_uniform",
    "seeding_weights",
    "sq_step",
    "transport_value",
]
