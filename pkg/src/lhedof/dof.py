"""Solution space of local histogram equalization.

When the centre pixel of a window shares its gray level with other pixels,
its rank is only known up to an interval. Mapping that interval onto the
output gray-level range gives, for every pixel, a closed integer interval
of equally valid LHE outputs. The collection of those intervals is a
:class:`BoundsField`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GrayImage, box_sum, check_window, window_count


@dataclass(frozen=True, eq=False)
class BoundsField:
    """Per-pixel integer interval ``[lower, upper]`` of admissible outputs."""

    lower: np.ndarray
    upper: np.ndarray
    levels: int = 256

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=np.int64)
        hi = np.asarray(self.upper, dtype=np.int64)
        if lo.shape != hi.shape or lo.ndim != 2:
            raise ValueError("lower and upper must be 2-D arrays of equal shape")
        if lo.min() < 0 or hi.max() > self.levels - 1 or np.any(lo > hi):
            raise ValueError("bounds must satisfy 0 <= lower <= upper <= levels - 1")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def shape(self) -> tuple[int, int]:
        return self.lower.shape

    def contains(self, image) -> bool:
        """True if every pixel of ``image`` lies inside its interval."""
        px = image.pixels if isinstance(image, GrayImage) else np.asarray(image)
        return px.shape == self.shape and bool(np.all((px >= self.lower) & (px <= self.upper)))


@dataclass(frozen=True)
class TargetCumHist:
    """Spatially uniform target cumulative histogram ``G(0..L-1)``.

    Values must be non-negative, non-decreasing and end on a positive total.
    Integer values are handled in exact arithmetic.
    """

    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.values)
        if g.ndim != 1 or g.size < 2:
            raise ValueError("target cumulative histogram must be 1-D with at least 2 entries")
        if np.any(g < 0) or np.any(np.diff(g) < 0) or g[-1] <= 0:
            raise ValueError("target cumulative histogram must be non-negative, "
                             "non-decreasing and end positive")
        object.__setattr__(self, "values", g)

    @classmethod
    def from_histogram(cls, hist) -> "TargetCumHist":
        return cls(np.cumsum(np.asarray(hist)))

    @classmethod
    def flat(cls, levels: int = 256) -> "TargetCumHist":
        return cls(np.arange(1, levels + 1, dtype=np.int64))

    @property
    def levels(self) -> int:
        return self.values.size


def rank_counts(image: GrayImage, w: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cumulative local-histogram counts at every pixel.

    Returns ``(below, at_or_below, total)``: the number of window pixels with
    a gray level strictly below, and at or below, the centre pixel's level,
    and the clipped window size. The centre pixel's rank lies in
    ``(below, at_or_below]``.
    """
    check_window(w, image.shape)
    px = image.pixels
    below = np.zeros(px.shape, dtype=np.int64)
    at_or_below = np.zeros(px.shape, dtype=np.int64)
    present = np.unique(px)
    # count(<= k) evaluated only at levels present; count(< next present) is the same number
    for k, k_next in zip(present, np.append(present[1:], -1)):
        cum = box_sum(px <= k, w)
        here = px == k
        at_or_below[here] = cum[here]
        if k_next >= 0:
            nxt = px == k_next
            below[nxt] = cum[nxt]
    return below, at_or_below, window_count(px.shape, w)


def rank_range(image: GrayImage, w: int, m: int, n: int) -> tuple[int, int]:
    """Rank interval ``(lo, hi]`` of pixel ``(m, n)`` (row, column) in its window."""
    check_window(w, image.shape)
    if not (0 <= m < image.height and 0 <= n < image.width):
        raise IndexError(f"pixel ({m}, {n}) outside {image.height}x{image.width} image")
    px = image.pixels
    win = px[max(m - w, 0):m + w + 1, max(n - w, 0):n + w + 1]
    v = px[m, n]
    return int(np.count_nonzero(win < v)), int(np.count_nonzero(win <= v))


def dof_bounds(image: GrayImage, w: int) -> BoundsField:
    """Per-pixel interval of valid LHE output levels.

    Both rank endpoints go through the same map ``min(L-1, floor(L*H/total))``.
    """
    L = image.levels
    below, at_or_below, total = rank_counts(image, w)
    lower = np.minimum(L - 1, (L * below) // total)
    upper = np.minimum(L - 1, (L * at_or_below) // total)
    return BoundsField(lower, upper, L)


def _inverse_target(target: TargetCumHist, count: np.ndarray, total: np.ndarray) -> np.ndarray:
    """Generalised inverse of the normalised target at rank fraction count/total.

    Returns the first level whose normalised cumulative exceeds the fraction,
    capped at the first level where the target reaches its total. For the
    flat target this is exactly ``min(L-1, floor(L * count / total))``.
    """
    g = target.values
    g_total = g[-1]
    top = int(np.argmax(g >= g_total))
    if np.issubdtype(g.dtype, np.integer):
        # G(b) * total > G_total * count  <=>  G(b) > floor(G_total * count / total)
        threshold = (int(g_total) * count) // total
        idx = np.searchsorted(g, threshold, side="right")
    else:
        idx = np.searchsorted(g / g_total, count / total, side="right")
    return np.minimum(idx, top)


def dof_bounds_specified(image: GrayImage, w: int, target: TargetCumHist) -> BoundsField:
    """DoF bounds for local histogram specification towards ``target``."""
    if target.levels != image.levels:
        raise ValueError("target histogram length must equal the image's level count")
    below, at_or_below, total = rank_counts(image, w)
    lower = _inverse_target(target, below, total)
    upper = _inverse_target(target, at_or_below, total)
    return BoundsField(lower, upper, image.levels)


def solution_space_log2(bounds: BoundsField) -> float:
    """log2 of the number of images inside ``bounds``."""
    widths = (bounds.upper - bounds.lower + 1).astype(np.float64)
    return float(np.sum(np.log2(widths)))


def basic_lhe(image: GrayImage, w: int) -> GrayImage:
    """Classic LHE output: the upper end of every pixel's interval."""
    return GrayImage(dof_bounds(image, w).upper, image.levels)
