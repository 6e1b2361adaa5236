"""Projected SSIM gradient ascent over a bounds field.

Each iteration moves the current solution along the SSIM gradient and
projects the result back into the bounds by clamping and rounding. The
step size is either a fixed fraction of the first-order estimate
``(1 - SSIM) / |grad|^2`` or the best value found by a golden-section
search around it. A step is only kept if it strictly raises SSIM; otherwise
the step is halved a few times before giving up, so the recorded SSIM never
decreases.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import GrayImage
from .dof import BoundsField
from .mse import min_mse_solution
from .ssim import SsimConfig, ssim, ssim_gradient

log = logging.getLogger(__name__)

DEGENERATE_GRAD_SQ = 1e-12
MAX_HALVINGS = 6
SEARCH_LOW = 0.05
SEARCH_HIGH = 4.0
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for :func:`maximize_ssim`.

    init : ``"midpoint"`` or ``"min_mse"``
    step_policy : ``"search"`` (golden-section on the step) or ``"beta0"``
        (fixed fraction ``beta_fraction`` of the first-order estimate)
    """

    init: str = "min_mse"
    step_policy: str = "search"
    beta_fraction: float = 0.5
    max_iters: int = 50
    min_delta: float = 1e-6
    search_budget: int = 12

    def __post_init__(self):
        if self.init not in ("midpoint", "min_mse"):
            raise ValueError(f"unknown init strategy {self.init!r}")
        if self.step_policy not in ("search", "beta0"):
            raise ValueError(f"unknown step policy {self.step_policy!r}")
        if not 0 < self.beta_fraction <= 1:
            raise ValueError("beta_fraction must be in (0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.min_delta < 0:
            raise ValueError("min_delta must be non-negative")
        if self.search_budget < 2:
            raise ValueError("search_budget must be at least 2")


@dataclass
class StepRecord:
    iteration: int
    beta: float
    ssim: float


@dataclass
class OptTrace:
    records: list[StepRecord] = field(default_factory=list)
    reason: str = ""

    @property
    def ssim_values(self) -> list[float]:
        return [r.ssim for r in self.records]

    @property
    def accepted_steps(self) -> int:
        # first record is the starting point
        return max(len(self.records) - 1, 0)

    @property
    def final_ssim(self) -> float:
        return self.records[-1].ssim


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0, np.floor(x + 0.5), np.ceil(x - 0.5))


def project(values: np.ndarray, bounds: BoundsField) -> GrayImage:
    """Clamp a real-valued field into ``bounds`` and round to integers."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != bounds.shape:
        raise ValueError(f"shape {values.shape} does not match bounds {bounds.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("cannot project non-finite values")
    out = np.clip(_round_half_away(values), bounds.lower, bounds.upper)
    return GrayImage(out.astype(np.int64), bounds.levels)


def beta0(image: GrayImage, y: GrayImage, cfg: SsimConfig = SsimConfig(),
          grad: np.ndarray | None = None, current: float | None = None) -> float | None:
    """First-order step estimate ``(1 - SSIM) / |grad|^2``.

    Returns None when the gradient is numerically zero.
    """
    if grad is None:
        grad = ssim_gradient(image, y, cfg)
    if current is None:
        current = ssim(image, y, cfg)
    norm_sq = float(np.sum(grad * grad))
    if norm_sq < DEGENERATE_GRAD_SQ:
        return None
    return (1.0 - current) / norm_sq


def beta_search(image: GrayImage, y: GrayImage, bounds: BoundsField,
                cfg: SsimConfig = SsimConfig(), budget: int = 12,
                grad: np.ndarray | None = None, current: float | None = None):
    """Golden-section search for the step maximising SSIM after projection.

    Searches ``[0.05 b0, 4 b0]`` where ``b0`` is :func:`beta0`, spending at
    most ``budget`` SSIM evaluations including the one at ``b0`` itself.
    Returns ``(beta, candidate, candidate_ssim)`` for the best point seen, so
    the result is never worse than the plain ``b0`` step. If the gradient is
    degenerate, returns ``(0.0, y, current)``.
    """
    if grad is None:
        grad = ssim_gradient(image, y, cfg)
    if current is None:
        current = ssim(image, y, cfg)
    b0 = beta0(image, y, cfg, grad=grad, current=current)
    if b0 is None:
        return 0.0, y, current

    base = y.pixels.astype(np.float64)
    cache = {}

    def evaluate(beta):
        cand = project(base + beta * grad, bounds)
        key = cand.pixels.tobytes()
        if key not in cache:
            cache[key] = ssim(image, cand, cfg)
        return cache[key], cand

    best_val, best_cand = evaluate(b0)
    best_beta = b0
    evals = 1

    def consider(beta, val, cand):
        nonlocal best_beta, best_val, best_cand
        if val > best_val:
            best_beta, best_val, best_cand = beta, val, cand

    lo, hi = SEARCH_LOW * b0, SEARCH_HIGH * b0
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, cand_c = evaluate(c)
    fd, cand_d = evaluate(d)
    evals += 2
    consider(c, fc, cand_c)
    consider(d, fd, cand_d)
    while evals < budget:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc, cand_c = evaluate(c)
            consider(c, fc, cand_c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd, cand_d = evaluate(d)
            consider(d, fd, cand_d)
        evals += 1
    return best_beta, best_cand, best_val


def init_solution(strategy: str, image: GrayImage, bounds: BoundsField) -> GrayImage:
    """Starting point: interval midpoints or the minimum-MSE solution."""
    if strategy == "midpoint":
        mid = _round_half_away((bounds.lower + bounds.upper) / 2.0)
        return GrayImage(mid.astype(np.int64), bounds.levels)
    if strategy == "min_mse":
        return min_mse_solution(image, bounds)
    raise ValueError(f"unknown init strategy {strategy!r}")


def maximize_ssim(image: GrayImage, bounds: BoundsField,
                  ocfg: OptimizerConfig = OptimizerConfig(),
                  scfg: SsimConfig = SsimConfig(),
                  start: GrayImage | None = None) -> tuple[GrayImage, OptTrace]:
    """Search ``bounds`` for the image with the highest SSIM against ``image``.

    ``start`` overrides the configured initialisation; it must lie inside
    ``bounds``.
    """
    if image.shape != bounds.shape:
        raise ValueError(f"image shape {image.shape} does not match bounds {bounds.shape}")
    y = start if start is not None else init_solution(ocfg.init, image, bounds)
    if not bounds.contains(y):
        raise ValueError("starting point lies outside the bounds")

    current = ssim(image, y, scfg)
    trace = OptTrace([StepRecord(0, 0.0, current)])
    for it in range(1, ocfg.max_iters + 1):
        grad = ssim_gradient(image, y, scfg)
        if ocfg.step_policy == "search":
            beta, cand, value = beta_search(image, y, bounds, scfg, ocfg.search_budget,
                                            grad=grad, current=current)
            if beta == 0.0:
                trace.reason = "degenerate_gradient"
                break
        else:
            b0 = beta0(image, y, scfg, grad=grad, current=current)
            if b0 is None:
                trace.reason = "degenerate_gradient"
                break
            beta = ocfg.beta_fraction * b0
            cand = project(y.pixels + beta * grad, bounds)
            value = ssim(image, cand, scfg)

        halvings = 0
        while value <= current and halvings < MAX_HALVINGS:
            beta /= 2.0
            cand = project(y.pixels + beta * grad, bounds)
            value = ssim(image, cand, scfg)
            halvings += 1
        if value <= current:
            trace.reason = "no_improvement"
            break

        gain = value - current
        y, current = cand, value
        trace.records.append(StepRecord(it, beta, current))
        log.debug("iteration %d: beta=%.4g ssim=%.8f", it, beta, current)
        if gain < ocfg.min_delta:
            trace.reason = "converged"
            break
    else:
        trace.reason = "max_iters"
    return y, trace
