"""Closed-form best and worst PSNR solutions inside a bounds field."""

from __future__ import annotations

import math

import numpy as np

from .core import GrayImage
from .dof import BoundsField


def _check(image: GrayImage, bounds: BoundsField):
    if image.shape != bounds.shape:
        raise ValueError(f"image shape {image.shape} does not match bounds {bounds.shape}")


def min_mse_solution(image: GrayImage, bounds: BoundsField) -> GrayImage:
    """Solution closest to ``image`` in squared error: clamp it into the bounds."""
    _check(image, bounds)
    return image.with_pixels(np.clip(image.pixels, bounds.lower, bounds.upper))


def max_mse_solution(image: GrayImage, bounds: BoundsField) -> GrayImage:
    """Solution farthest from ``image``: the interval endpoint farther from each pixel.

    Equidistant endpoints resolve to the upper one.
    """
    _check(image, bounds)
    px, lo, hi = image.pixels, bounds.lower, bounds.upper
    farther = np.where(np.abs(hi - px) >= np.abs(lo - px), hi, lo)
    out = np.where(px <= lo, hi, np.where(px >= hi, lo, farther))
    return image.with_pixels(out)


def mse(a: GrayImage, b: GrayImage) -> float:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a.pixels - b.pixels
    return float(np.mean(d * d))


def psnr(a: GrayImage, b: GrayImage) -> float:
    """Peak signal-to-noise ratio in dB with peak ``L - 1``.

    Identical images return ``math.inf``.
    """
    if a.levels != b.levels:
        raise ValueError("images have different level counts")
    err = mse(a, b)
    if err == 0:
        return math.inf
    return 10.0 * math.log10((a.levels - 1) ** 2 / err)
