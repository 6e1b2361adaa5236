"""Independent brute-force reference implementations used by the tests.

None of these share code with the package beyond the kernel taps.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def naive_window_stats(image, w, fn):
    """Apply ``fn`` to the clipped window around every pixel with plain loops."""
    px = np.asarray(image)
    h, wd = px.shape
    out = np.zeros((h, wd))
    for m in range(h):
        for n in range(wd):
            out[m, n] = fn(px[max(m - w, 0):m + w + 1, max(n - w, 0):n + w + 1])
    return out


def naive_ssim_map(x, y, kernel2d, c1, c2, dtype=np.float64):
    """Two-pass per-window SSIM over fully supported windows."""
    x = np.asarray(x, dtype=dtype)
    y = np.asarray(y, dtype=dtype)
    k = np.asarray(kernel2d, dtype=dtype)
    kh, kw = k.shape
    wx = sliding_window_view(x, (kh, kw))
    wy = sliding_window_view(y, (kh, kw))
    mx = np.sum(wx * k, axis=(-2, -1))
    my = np.sum(wy * k, axis=(-2, -1))
    dx = wx - mx[..., None, None]
    dy = wy - my[..., None, None]
    vx = np.sum(k * dx * dx, axis=(-2, -1))
    vy = np.sum(k * dy * dy, axis=(-2, -1))
    cxy = np.sum(k * dx * dy, axis=(-2, -1))
    return ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))


def naive_ssim(x, y, kernel2d, c1, c2, dtype=np.float64):
    return np.mean(naive_ssim_map(x, y, kernel2d, c1, c2, dtype))


def fd_ssim_gradient(x, y, kernel2d, c1, c2, h=1e-3):
    """Central differences of the naive SSIM in extended precision."""
    y = np.asarray(y, dtype=np.longdouble)
    grad = np.zeros(y.shape)
    for i in range(y.shape[0]):
        for j in range(y.shape[1]):
            yp = y.copy()
            ym = y.copy()
            yp[i, j] += h
            ym[i, j] -= h
            up = naive_ssim(x, yp, kernel2d, c1, c2, np.longdouble)
            dn = naive_ssim(x, ym, kernel2d, c1, c2, np.longdouble)
            grad[i, j] = float((up - dn) / (2 * np.longdouble(h)))
    return grad
