"""Viewports, scalar image grids and binary PGM/PPM output."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Viewport:
    center: complex
    width: float
    height: float
    pixels_x: int
    pixels_y: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("viewport extents must be positive")
        if self.pixels_x < 1 or self.pixels_y < 1:
            raise ValueError("viewport needs at least one pixel per axis")

    @classmethod
    def square(cls, center: complex, width: float, pixels: int) -> "Viewport":
        return cls(complex(center), width, width, pixels, pixels)

    @property
    def pixel_size(self) -> tuple[float, float]:
        return self.width / self.pixels_x, self.height / self.pixels_y

    def pixel_to_plane(self, col, row):
        """Pixel centres; row 0 is the top row."""
        dx, dy = self.pixel_size
        re = self.center.real - self.width / 2 + (np.asarray(col) + 0.5) * dx
        im = self.center.imag + self.height / 2 - (np.asarray(row) + 0.5) * dy
        return re + 1j * im

    def plane_to_pixel(self, z):
        dx, dy = self.pixel_size
        z = np.asarray(z, dtype=complex)
        col = (z.real - (self.center.real - self.width / 2)) / dx - 0.5
        row = ((self.center.imag + self.height / 2) - z.imag) / dy - 0.5
        return col, row

    def rows(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Complex coordinates of pixel rows ``start:stop``."""
        stop = self.pixels_y if stop is None else stop
        cols = np.arange(self.pixels_x)
        rows = np.arange(start, stop)
        return self.pixel_to_plane(cols[None, :], rows[:, None])

    def grid(self) -> np.ndarray:
        return self.rows()


@dataclass
class ImageGrid:
    """Per-pixel scalar field over a viewport.

    ``interior`` optionally carries a second channel for non-escaping pixels
    (the detected attracting period, 0 when unknown).
    """

    viewport: Viewport
    values: np.ndarray
    channel_label: str
    interior: np.ndarray | None = None

    def __post_init__(self):
        shape = (self.viewport.pixels_y, self.viewport.pixels_x)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} != viewport {shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("image values must be finite")


@dataclass(frozen=True)
class RenderParams:
    max_iter: int = 256
    escape_radius: float | None = None  # None: use the map's escape bound
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.escape_radius is not None and self.escape_radius <= 0:
            raise ValueError("escape_radius must be positive")


def map_rows(
    viewport: Viewport, fn: Callable[[np.ndarray], tuple], threads: int = 1, block: int = 32
) -> list[tuple]:
    """Apply ``fn`` to blocks of pixel rows; results come back in row order."""
    spans = [(s, min(s + block, viewport.pixels_y)) for s in range(0, viewport.pixels_y, block)]
    if threads <= 1:
        return [fn(viewport.rows(a, b)) for a, b in spans]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda ab: fn(viewport.rows(*ab)), spans))


# anchor colours, evenly spaced over [0, 1]
COLORMAPS: dict[str, list[tuple[int, int, int]]] = {
    "gray": [(0, 0, 0), (255, 255, 255)],
    "fire": [(0, 0, 0), (128, 0, 0), (230, 90, 0), (255, 210, 60), (255, 255, 230)],
    "ocean": [(0, 0, 20), (0, 40, 110), (20, 130, 190), (170, 225, 240), (255, 255, 255)],
    "twilight": [(20, 10, 40), (90, 40, 140), (210, 110, 120), (250, 220, 170)],
}

INTERIOR_PALETTE = [
    (10, 10, 10),
    (40, 60, 150),
    (30, 120, 60),
    (150, 40, 40),
    (120, 90, 20),
    (90, 40, 120),
    (20, 110, 120),
]


def normalize(values: np.ndarray) -> np.ndarray:
    """Affine map of nonzero values onto 1..255; zero stays 0.

    A grid whose nonzero values are all equal maps them to 255.
    """
    values = np.asarray(values, dtype=float)
    out = np.zeros(values.shape, dtype=np.uint8)
    mask = values != 0
    if not np.any(mask):
        return out
    lo, hi = float(values[mask].min()), float(values[mask].max())
    if hi == lo:
        out[mask] = 255
        return out
    scaled = 1.0 + 254.0 * (values[mask] - lo) / (hi - lo)
    out[mask] = np.clip(np.rint(scaled), 1, 255).astype(np.uint8)
    return out


def apply_colormap(levels: np.ndarray, name: str, interior: np.ndarray | None = None) -> np.ndarray:
    if name not in COLORMAPS:
        raise ValueError(f"unknown colormap {name!r}; choose from {sorted(COLORMAPS)}")
    anchors = np.array(COLORMAPS[name], dtype=float)
    t = levels.astype(float) / 255.0
    pos = t * (len(anchors) - 1)
    i0 = np.clip(np.floor(pos).astype(int), 0, len(anchors) - 2)
    frac = (pos - i0)[..., None]
    rgb = anchors[i0] * (1 - frac) + anchors[i0 + 1] * frac
    rgb = np.rint(rgb).astype(np.uint8)
    if interior is not None:
        inside = levels == 0
        palette = np.array(INTERIOR_PALETTE, dtype=np.uint8)
        idx = np.asarray(interior, dtype=int) % len(palette)
        rgb[inside] = palette[idx[inside]]
    return rgb


def encode_image(grid: ImageGrid, colormap_name: str = "gray") -> bytes:
    levels = normalize(grid.values)
    h, w = levels.shape
    if colormap_name == "gray":
        return f"P5\n{w} {h}\n255\n".encode("ascii") + levels.tobytes()
    rgb = apply_colormap(levels, colormap_name, grid.interior)
    return f"P6\n{w} {h}\n255\n".encode("ascii") + rgb.tobytes()


def write_image(grid: ImageGrid, colormap_name: str, path: str | os.PathLike) -> None:
    """Write ``grid`` as binary PGM (``gray``) or PPM (any other colormap)."""
    data = encode_image(grid, colormap_name)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write image to {os.fspath(path)!r}: {exc.strerror}") from exc


def read_pnm(path: str | os.PathLike) -> tuple[str, int, int, np.ndarray]:
    """Read back a binary PGM/PPM written by :func:`write_image`."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    w, h = (int(v) for v in dims.split())
    channels = 3 if magic == b"P6" else 1
    pixels = np.frombuffer(rest, dtype=np.uint8, count=w * h * channels)
    shape = (h, w, 3) if channels == 3 else (h, w)
    return magic.decode(), w, h, pixels.reshape(shape)
