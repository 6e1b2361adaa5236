"""Gray-level image type and clipped-window statistics.

Every windowed quantity in this package uses the same boundary policy: the
``(2w+1) x (2w+1)`` window centred on a pixel is clipped to the image, and
normalisations use the number of pixels actually inside the clipped window.
Window sums are taken from integral images so integer inputs stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_LEVELS = 256


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Immutable 2-D raster of integer gray levels in ``[0, levels - 1]``.

    Parameters
    ----------
    pixels : array_like
        Row-major ``(height, width)`` array of integer gray levels.
    levels : int
        Number of representable gray levels ``L`` (256 for 8-bit data).
    """

    pixels: np.ndarray
    levels: int = DEFAULT_LEVELS

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D raster, got shape {arr.shape}")
        if self.levels < 2:
            raise ValueError("levels must be at least 2")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
                raise ValueError("gray levels must be integers")
        arr = arr.astype(np.int64)
        if arr.min() < 0 or arr.max() > self.levels - 1:
            raise ValueError(f"gray levels must lie in [0, {self.levels - 1}]")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.levels == other.levels and np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.levels, self.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height}, levels={self.levels})"

    def with_pixels(self, pixels) -> "GrayImage":
        """Return a new image at the same bit depth."""
        return GrayImage(pixels, self.levels)


def as_float(image) -> np.ndarray:
    """Promote a GrayImage or array to a float64 array."""
    if isinstance(image, GrayImage):
        return image.pixels.astype(np.float64)
    return np.asarray(image, dtype=np.float64)


def check_window(w: int, shape: tuple[int, int]) -> int:
    """Validate a window half-width against an image shape and return it."""
    if int(w) != w or w < 1:
        raise ValueError(f"window half-width must be a positive integer, got {w!r}")
    if 2 * w + 1 > min(shape):
        raise ValueError(
            f"window {2 * w + 1}x{2 * w + 1} does not fit a {shape[1]}x{shape[0]} image"
        )
    return int(w)


def box_sum(a: np.ndarray, w: int) -> np.ndarray:
    """Sum of ``a`` over the clipped ``(2w+1) x (2w+1)`` window at every pixel.

    Integer input gives an exact integer result.
    """
    a = np.asarray(a)
    h, wd = a.shape
    dtype = np.int64 if np.issubdtype(a.dtype, np.integer) or a.dtype == bool else np.float64
    integral = np.zeros((h + 1, wd + 1), dtype=dtype)
    integral[1:, 1:] = np.cumsum(np.cumsum(a, axis=0, dtype=dtype), axis=1, dtype=dtype)

    rows = np.arange(h)
    cols = np.arange(wd)
    r0 = np.clip(rows - w, 0, h)[:, None]
    r1 = np.clip(rows + w + 1, 0, h)[:, None]
    c0 = np.clip(cols - w, 0, wd)[None, :]
    c1 = np.clip(cols + w + 1, 0, wd)[None, :]
    return integral[r1, c1] - integral[r0, c1] - integral[r1, c0] + integral[r0, c0]


def window_count(shape: tuple[int, int], w: int) -> np.ndarray:
    """Number of pixels in each clipped window."""
    h, wd = shape
    rows = np.minimum(np.arange(h) + w, h - 1) - np.maximum(np.arange(h) - w, 0) + 1
    cols = np.minimum(np.arange(wd) + w, wd - 1) - np.maximum(np.arange(wd) - w, 0) + 1
    return rows[:, None] * cols[None, :]


def local_mean(image: GrayImage, w: int) -> np.ndarray:
    """Mean gray level over the clipped window centred on each pixel."""
    check_window(w, image.shape)
    return box_sum(image.pixels, w) / window_count(image.shape, w)


def local_variance(image: GrayImage, w: int) -> np.ndarray:
    """Population variance of gray levels over each clipped window."""
    check_window(w, image.shape)
    n = window_count(image.shape, w)
    s1 = box_sum(image.pixels, w)
    s2 = box_sum(image.pixels * image.pixels, w)
    # n*s2 - s1**2 is exact in int64 for 8-bit data and windows up to ~10^4 pixels
    var = (n * s2 - s1 * s1) / (n * n).astype(np.float64)
    return np.maximum(var, 0.0)
