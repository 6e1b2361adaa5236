"""Contrast/similarity trade-off sweep over the SPL parameter."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

from .core import GrayImage, local_variance
from .mse import min_mse_solution, psnr
from .optimize import OptimizerConfig
from .ssim import SsimConfig, ssim
from .stark import StarkConfig, ssim_optimize_with_baseline, stark_bounds

METHODS = ("stark", "stark_mse_opt", "stark_ssim_opt")
CSV_FIELDS = ("method", "alpha", "window", "psnr_db", "ssim", "local_energy", "iterations_used")


@dataclass(frozen=True)
class SweepRecord:
    method: str
    alpha: float
    psnr_db: float
    ssim: float
    local_energy: float
    window: int
    iterations_used: int = 0


def total_local_energy(image: GrayImage, w: int) -> float:
    """Sum over pixels of the clipped-window variance."""
    return float(np.sum(local_variance(image, w)))


def evaluate(reference: GrayImage, test: GrayImage, w: int,
             scfg: SsimConfig | None = None) -> dict:
    """PSNR, SSIM and local energy of ``test`` against ``reference``."""
    scfg = scfg or SsimConfig("box", w=w, dynamic_range=reference.levels - 1)
    return {
        "psnr": psnr(reference, test),
        "ssim": ssim(reference, test, scfg),
        "local_energy": total_local_energy(test, w),
    }


def sweep(image: GrayImage, alphas, w: int,
          ocfg: OptimizerConfig = OptimizerConfig(),
          scfg: SsimConfig | None = None) -> list[SweepRecord]:
    """Baseline, PSNR-optimised and SSIM-optimised SPL output for each alpha.

    ``alpha = 0`` rows are classic LHE and its optimised versions.
    """
    alphas = list(alphas)
    if not alphas:
        raise ValueError("need at least one alpha")
    scfg = scfg or SsimConfig("box", w=w, dynamic_range=image.levels - 1)
    records = []
    for alpha in alphas:
        bounds = stark_bounds(image, StarkConfig(float(alpha), w))
        baseline = image.with_pixels(bounds.upper)
        outputs = {
            "stark": (baseline, 0),
            "stark_mse_opt": (min_mse_solution(image, bounds), 0),
        }
        best, trace = ssim_optimize_with_baseline(image, bounds, baseline, ocfg, scfg)
        outputs["stark_ssim_opt"] = (best, trace.accepted_steps)
        for method in METHODS:
            out, iters = outputs[method]
            m = evaluate(image, out, w, scfg)
            records.append(SweepRecord(method, float(alpha), m["psnr"], m["ssim"],
                                       m["local_energy"], w, iters))
    return sort_records(records)


def sort_records(records):
    order = {m: i for i, m in enumerate(METHODS)}
    return sorted(records, key=lambda r: (order.get(r.method, len(order)), r.method, r.alpha))


def emit_csv(records, destination: str | os.PathLike | None = None) -> str:
    """Render records as CSV (6-decimal floats) and optionally write it out."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in sort_records(records):
        writer.writerow([r.method, f"{r.alpha:.6f}", r.window, f"{r.psnr_db:.6f}",
                         f"{r.ssim:.6f}", f"{r.local_energy:.6f}", r.iterations_used])
    text = buf.getvalue()
    if destination is not None:
        with open(destination, "w", newline="") as fh:
            fh.write(text)
    return text


def read_csv(text: str) -> list[SweepRecord]:
    rows = csv.DictReader(io.StringIO(text))
    return [SweepRecord(r["method"], float(r["alpha"]), float(r["psnr_db"]), float(r["ssim"]),
                        float(r["local_energy"]), int(r["window"]), int(r["iterations_used"]))
            for r in rows]
