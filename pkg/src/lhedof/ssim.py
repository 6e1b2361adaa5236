"""SSIM map, index and analytic gradient.

Statistics are computed only where the kernel lies fully inside the image
("valid" positions), and the index is the mean over those positions. With
that convention the gradient's back-projection is an exact zero-padded full
convolution, so the analytic gradient agrees with finite differences to
rounding error.

Both kernels are separable and every filter is evaluated as a fixed-order
sum of shifted slices, so results do not depend on BLAS threading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GrayImage, as_float

GAUSSIAN_SIZE = 11
GAUSSIAN_SIGMA = 1.5


@dataclass(frozen=True)
class SsimConfig:
    """Kernel and stabilising constants.

    ``kernel`` is ``"box"`` (a ``(2w+1)``-square moving average) or
    ``"gaussian"`` (11x11, sigma 1.5, normalised; ``w`` is ignored).
    ``c1``/``c2`` default to ``(0.01 R)^2`` and ``(0.03 R)^2`` for dynamic
    range ``R``.
    """

    kernel: str = "box"
    w: int = 2
    dynamic_range: float = 255.0
    c1: float | None = None
    c2: float | None = None

    def __post_init__(self):
        if self.kernel not in ("box", "gaussian"):
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.kernel == "box" and self.w < 1:
            raise ValueError("box kernel needs w >= 1")
        if self.c1 is None:
            object.__setattr__(self, "c1", (0.01 * self.dynamic_range) ** 2)
        if self.c2 is None:
            object.__setattr__(self, "c2", (0.03 * self.dynamic_range) ** 2)
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("c1 and c2 must be positive")

    def taps(self) -> np.ndarray:
        """1-D factor of the separable kernel (sums to 1)."""
        if self.kernel == "box":
            size = 2 * self.w + 1
            return np.full(size, 1.0 / size)
        x = np.arange(GAUSSIAN_SIZE) - GAUSSIAN_SIZE // 2
        g = np.exp(-(x * x) / (2.0 * GAUSSIAN_SIGMA ** 2))
        return g / g.sum()

    def kernel2d(self) -> np.ndarray:
        t = self.taps()
        return np.outer(t, t)


def _valid_1d(a: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    k = taps.size
    n = a.shape[axis] - k + 1
    out = np.zeros(a.shape[:axis] + (n,) + a.shape[axis + 1:])
    for i, t in enumerate(taps):
        out += t * (a[i:i + n] if axis == 0 else a[:, i:i + n])
    return out


def filter_valid(a: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Separable correlation keeping only fully supported positions."""
    if min(a.shape) < taps.size:
        raise ValueError(f"kernel of size {taps.size} does not fit a {a.shape} image")
    return _valid_1d(_valid_1d(a, taps, 0), taps, 1)


def filter_adjoint(a: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`filter_valid`: full convolution back to image size."""
    k = taps.size - 1
    padded = np.pad(a, k)
    rev = taps[::-1]
    return _valid_1d(_valid_1d(padded, rev, 0), rev, 1)


def _statistics(x: np.ndarray, y: np.ndarray, cfg: SsimConfig):
    taps = cfg.taps()
    mu_x = filter_valid(x, taps)
    mu_y = filter_valid(y, taps)
    var_x = filter_valid(x * x, taps) - mu_x * mu_x
    var_y = filter_valid(y * y, taps) - mu_y * mu_y
    cov = filter_valid(x * y, taps) - mu_x * mu_y
    return mu_x, mu_y, var_x, var_y, cov


def _arrays(x, y):
    xa, ya = as_float(x), as_float(y)
    if xa.shape != ya.shape:
        raise ValueError(f"shape mismatch: {xa.shape} vs {ya.shape}")
    return xa, ya


def ssim_map(x, y, cfg: SsimConfig = SsimConfig()) -> np.ndarray:
    """Local SSIM at every valid position.

    The result is smaller than the inputs by ``kernel size - 1`` in each
    dimension.
    """
    xa, ya = _arrays(x, y)
    mu_x, mu_y, var_x, var_y, cov = _statistics(xa, ya, cfg)
    num = (2 * mu_x * mu_y + cfg.c1) * (2 * cov + cfg.c2)
    den = (mu_x * mu_x + mu_y * mu_y + cfg.c1) * (var_x + var_y + cfg.c2)
    return num / den


def ssim(x, y, cfg: SsimConfig = SsimConfig()) -> float:
    """Mean SSIM over valid positions; 1.0 exactly when ``x == y``."""
    return float(np.mean(ssim_map(x, y, cfg)))


def ssim_gradient(x, y, cfg: SsimConfig = SsimConfig()) -> np.ndarray:
    """Gradient of :func:`ssim` with respect to every pixel of ``y``.

    With ``A1 = 2 mu_x mu_y + C1``, ``A2 = 2 cov + C2``,
    ``B1 = mu_x^2 + mu_y^2 + C1``, ``B2 = var_x + var_y + C2`` and
    ``D = B1 B2``, the map is ``A1 A2 / D`` and

        dS/dcov   = 2 A1 / D
        dS/dvar_y = -S / B2
        F         = (2 mu_x (A2 - A1) - 2 mu_y S (B2 - B1)) / D

    where ``F`` collects every term that multiplies the mean filter alone.
    The gradient is ``(W' F + x W' dS/dcov + 2 y W' dS/dvar_y) / N`` with
    ``W'`` the adjoint filter and ``N`` the number of valid positions.
    """
    xa, ya = _arrays(x, y)
    taps = cfg.taps()
    mu_x, mu_y, var_x, var_y, cov = _statistics(xa, ya, cfg)
    a1 = 2 * mu_x * mu_y + cfg.c1
    a2 = 2 * cov + cfg.c2
    b1 = mu_x * mu_x + mu_y * mu_y + cfg.c1
    b2 = var_x + var_y + cfg.c2
    d = b1 * b2
    s = a1 * a2 / d

    d_cov = 2 * a1 / d
    d_var_y = -s / b2
    f = (2 * mu_x * (a2 - a1) - 2 * mu_y * s * (b2 - b1)) / d

    n_valid = s.size
    grad = (filter_adjoint(f, taps)
            + xa * filter_adjoint(d_cov, taps)
            + 2 * ya * filter_adjoint(d_var_y, taps))
    return grad / n_valid
