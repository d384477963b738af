"""Image I/O, palette mapping and distortion/size metrics."""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

import numpy as np
from numpy import typing as npt
from PIL import Image, UnidentifiedImageError

from stochquant.errors import ImageIOError, InvalidInputError
from stochquant.geometry import FloatArray, PixelCloud, as_palette, denormalize_array, nearest_all, normalize_array

PNG_COMPRESS_LEVEL = 9
MAX_PALETTE = 256

PathLike = str | os.PathLike


@dataclass(frozen=True)
class RawImage:
    """8-bit RGB raster stored as an ``(height, width, 3)`` uint8 array."""

    pixels: npt.NDArray[np.uint8]

    def __post_init__(self) -> None:
        px = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise InvalidInputError(f"expected an (H, W, 3) raster, got shape {px.shape}")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def flat(self) -> npt.NDArray[np.uint8]:
        return self.pixels.reshape(-1, 3)


@dataclass(frozen=True)
class IndexedImage:
    palette: npt.NDArray[np.uint8]  # (K, 3)
    indices: npt.NDArray[np.uint8]  # (H, W)

    def __post_init__(self) -> None:
        pal = np.ascontiguousarray(self.palette, dtype=np.uint8)
        idx = np.ascontiguousarray(self.indices)
        if pal.ndim != 2 or pal.shape[1] != 3 or not 1 <= pal.shape[0]:
            raise InvalidInputError("palette must have shape (K, 3)")
        if idx.ndim != 2 or (idx.size and int(idx.max()) >= pal.shape[0]) or (idx.size and int(idx.min()) < 0):
            raise InvalidInputError("indices must be an (H, W) array of valid palette indices")
        object.__setattr__(self, "palette", pal)
        object.__setattr__(self, "indices", idx)

    @property
    def height(self) -> int:
        return self.indices.shape[0]

    @property
    def width(self) -> int:
        return self.indices.shape[1]

    def reconstruct(self) -> RawImage:
        return RawImage(self.palette[self.indices])


@dataclass(frozen=True)
class CompressionMetrics:
    mse: float
    transport_value: float
    original_bytes: int
    compressed_bytes: int
    distinct_colors_before: int
    palette_size_after: int


def load_image(path: PathLike) -> RawImage:
    """Decode a JPEG/PNG file to 8-bit RGB.

    Alpha is composited over white; grayscale and palette images are
    expanded to RGB.
    """
    try:
        with Image.open(path) as im:
            im.load()
            has_alpha = im.mode in ("RGBA", "LA", "PA") or (
                im.mode == "P" and "transparency" in im.info
            )
            if has_alpha:
                rgba = im.convert("RGBA")
                background = Image.new("RGBA", rgba.size, (255, 255, 255, 255))
                rgb = Image.alpha_composite(background, rgba).convert("RGB")
            elif im.mode in ("I;16", "I;16B", "I;16L", "I"):
                # 16-bit grayscale: keep the high byte
                arr = np.asarray(im, dtype=np.uint32) >> 8
                rgb = Image.fromarray(arr.astype(np.uint8), "L").convert("RGB")
            else:
                rgb = im.convert("RGB")
            return RawImage(np.asarray(rgb, dtype=np.uint8))
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise ImageIOError(f"cannot read image {os.fspath(path)!r}: {exc}") from exc


def build_cloud(img: RawImage) -> PixelCloud:
    """One normalized point per pixel in raster order, each with weight 1/I."""
    points = normalize_array(img.flat())
    return PixelCloud.uniform(points)


def map_to_palette(img: RawImage, palette: FloatArray) -> IndexedImage:
    """Assign each pixel to its nearest palette color.

    The stored palette is the 8-bit rounding of ``palette``; pass a palette
    already on the 8-bit grid to make mapping and storage agree exactly.
    """
    pal = as_palette(palette)
    if pal.shape[0] > MAX_PALETTE:
        raise InvalidInputError(f"palette has {pal.shape[0]} colors, at most {MAX_PALETTE} supported")
    labels, _ = nearest_all(normalize_array(img.flat()), pal)
    indices = labels.astype(np.uint8).reshape(img.height, img.width)
    return IndexedImage(denormalize_array(pal), indices)


def encode_indexed_png(img: IndexedImage, path: PathLike | BinaryIO) -> int:
    """Write ``img`` as a palette-based PNG and return the number of bytes written.

    Encoder settings are fixed (compression level 9, no optimizer, no
    ancillary chunks), so the same image always produces the same bytes.
    """
    if img.palette.shape[0] > MAX_PALETTE:
        raise InvalidInputError(f"palette has {img.palette.shape[0]} colors, at most {MAX_PALETTE} supported")
    im = Image.fromarray(img.indices.astype(np.uint8), "P")
    im.putpalette(img.palette.reshape(-1).tolist())
    buf = io.BytesIO()
    im.save(buf, format="PNG", compress_level=PNG_COMPRESS_LEVEL, optimize=False)
    data = buf.getvalue()
    if hasattr(path, "write"):
        path.write(data)
    else:
        try:
            Path(path).write_bytes(data)
        except OSError as exc:
            raise ImageIOError(f"cannot write {os.fspath(path)!r}: {exc}") from exc
    return len(data)


def decode_indexed_png(path: PathLike | BinaryIO) -> IndexedImage:
    """Read back a file written by :func:`encode_indexed_png`."""
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode != "P":
                raise ImageIOError(f"not a palette image (mode {im.mode})")
            indices = np.asarray(im, dtype=np.uint8)
            palette = np.asarray(im.getpalette(), dtype=np.uint8).reshape(-1, 3)
    except (OSError, UnidentifiedImageError) as exc:
        raise ImageIOError(f"cannot read indexed PNG: {exc}") from exc
    return IndexedImage(palette, indices)


def encode_rgb_png(img: RawImage) -> int:
    """Size in bytes of a 24-bit PNG of ``img`` at the same encoder settings."""
    buf = io.BytesIO()
    Image.fromarray(img.pixels, "RGB").save(buf, format="PNG", compress_level=PNG_COMPRESS_LEVEL)
    return len(buf.getvalue())


def mse(a: RawImage, b: RawImage) -> float:
    """Mean squared error over pixels and channels on the [0, 1] scale."""
    if a.pixels.shape != b.pixels.shape:
        raise InvalidInputError(f"image shapes differ: {a.pixels.shape} vs {b.pixels.shape}")
    diff = normalize_array(a.pixels) - normalize_array(b.pixels)
    return math.fsum((diff * diff).ravel()) / diff.size


def transport_value(cloud: PixelCloud, palette: FloatArray, r: float) -> float:
    """Unweighted sum over pixels of the r-th power distance to the nearest color."""
    _, sq = nearest_all(cloud.points, as_palette(palette))
    return math.fsum(sq ** (r / 2.0))


def _packed(img: RawImage) -> npt.NDArray[np.uint32]:
    flat = img.flat().astype(np.uint32)
    return (flat[:, 0] << 16) | (flat[:, 1] << 8) | flat[:, 2]


def count_distinct_colors(img: RawImage) -> int:
    return int(np.unique(_packed(img)).size)


def distinct_colors(img: RawImage) -> npt.NDArray[np.uint8]:
    """Distinct RGB triples in first-appearance raster order."""
    _, first = np.unique(_packed(img), return_index=True)
    return img.flat()[np.sort(first)]


def file_size(path: PathLike) -> int:
    try:
        return os.path.getsize(path)
    except OSError as exc:
        raise ImageIOError(f"cannot stat {os.fspath(path)!r}: {exc}") from exc
