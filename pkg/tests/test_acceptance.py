"""Exit criteria for the package, one test per criterion.

Each test prints a PASS/FAIL line with its runtime against the stated time
budget; the lines are repeated in the pytest terminal summary.
"""

import hashlib
import os
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import N1, N2, random_image
from lhedof.core import GrayImage
from lhedof.dof import BoundsField, basic_lhe, dof_bounds, rank_range, solution_space_log2
from lhedof.harness import emit_csv, sweep
from lhedof.mse import max_mse_solution, min_mse_solution, mse
from lhedof.optimize import OptimizerConfig, init_solution, maximize_ssim
from lhedof.plotting import emit_plot
from lhedof.ssim import SsimConfig, ssim, ssim_gradient, ssim_map
from lhedof.stark import StarkConfig, stark_enhance
from oracles import fd_ssim_gradient, naive_ssim_map

RESULTS = []
SWEEP_ALPHAS = [round(0.1 * k, 1) for k in range(11)]


@contextmanager
def criterion(number, title, budget_s, spent=0.0):
    start = time.perf_counter() - spent
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget_s, f"took {elapsed:.1f} s, budget {budget_s} s"
    except BaseException as exc:
        line = f"FAIL  criterion {number}: {title} ({time.perf_counter() - start:.2f} s) -- {exc}"
        RESULTS.append(line.splitlines()[0])
        print(line)
        raise
    line = f"PASS  criterion {number}: {title} ({elapsed:.2f} s < {budget_s} s)"
    RESULTS.append(line)
    print(line)


def synthetic_image(seed=7):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:128, 0:128]
    px = 60 + 0.8 * xx + 40 * (((xx // 32) + (yy // 32)) % 2) + rng.normal(0, 3, (128, 128))
    return GrayImage(np.clip(np.round(px), 0, 255).astype(int))


def test_c1_worked_examples():
    with criterion(1, "rank ranges and DoF of the 3x3 worked examples", 1.0):
        const = GrayImage(np.full((3, 3), 128))
        assert rank_range(GrayImage(N1), 1, 1, 1) == (4, 5)
        assert rank_range(GrayImage(N2), 1, 1, 1) == (2, 6)
        assert rank_range(const, 1, 1, 1) == (0, 9)
        for px, expected in ((const.pixels, (0, 255)), (N2, (56, 170)), (N1, (113, 142))):
            b = dof_bounds(GrayImage(px), 1)
            assert (int(b.lower[1, 1]), int(b.upper[1, 1])) == expected


def test_c2_mse_optimality_oracle():
    rng = np.random.default_rng(2)
    with criterion(2, "exhaustive MSE oracle and random feasible solutions", 5.0):
        for _ in range(50):
            img = random_image(rng, (4, 4), levels=8)
            b = dof_bounds(img, 1)
            best = min_mse_solution(img, b)
            worst = max_mse_solution(img, b)
            for idx in np.ndindex(img.shape):
                cands = np.arange(b.lower[idx], b.upper[idx] + 1)
                err = (cands - img.pixels[idx]) ** 2
                assert (best.pixels[idx] - img.pixels[idx]) ** 2 == err.min()
                assert (worst.pixels[idx] - img.pixels[idx]) ** 2 == err.max()
            lo, hi = mse(img, best), mse(img, worst)
            for _ in range(20):
                s = GrayImage(rng.integers(b.lower, b.upper + 1), 8)
                assert lo <= mse(img, s) <= hi
        # 1000 random feasible solutions against one 8-level instance
        img = random_image(rng, (4, 4), levels=8)
        b = dof_bounds(img, 1)
        lo, hi = mse(img, min_mse_solution(img, b)), mse(img, max_mse_solution(img, b))
        for _ in range(1000):
            assert lo <= mse(img, GrayImage(rng.integers(b.lower, b.upper + 1), 8)) <= hi


def test_c3_ssim_oracles():
    rng = np.random.default_rng(3)
    kernels = (SsimConfig("box", w=1), SsimConfig("gaussian"))
    with criterion(3, "SSIM vs naive windows (1e-12) and gradient vs finite differences (1e-5)", 30.0):
        for cfg in kernels:
            for _ in range(20):
                x, y = random_image(rng, (16, 16)), random_image(rng, (16, 16))
                ref = naive_ssim_map(x.pixels, y.pixels, cfg.kernel2d(), cfg.c1, cfg.c2)
                assert np.max(np.abs(ssim_map(x, y, cfg) - ref)) <= 1e-12
                assert abs(ssim(x, y, cfg) - ref.mean()) <= 1e-12
            for _ in range(10):
                x, y = random_image(rng, (12, 12)), random_image(rng, (12, 12))
                g = ssim_gradient(x, y, cfg)
                fd = fd_ssim_gradient(x.pixels, y.pixels, cfg.kernel2d(), cfg.c1, cfg.c2, h=1e-3)
                assert np.max(np.abs(fd - g) / np.abs(g)) <= 1e-5


@pytest.mark.parametrize("which", ["cameraman", "synthetic"])
def test_c4_optimizer_contract(which, cameraman):
    img = cameraman if which == "cameraman" else synthetic_image()
    scfg = SsimConfig("box", w=2)
    with criterion(4, f"optimizer contract on {which} 128x128, 5x5 window", 60.0):
        b = dof_bounds(img, 2)
        finals = {}
        for init in ("midpoint", "min_mse"):
            out, trace = maximize_ssim(img, b, OptimizerConfig(init=init), scfg)
            assert b.contains(out)
            values = trace.ssim_values
            assert all(v1 >= v0 for v0, v1 in zip(values, values[1:]))
            finals[init] = trace.final_ssim
        start_scores = [ssim(img, init_solution(s, img, b), scfg) for s in ("midpoint", "min_mse")]
        lhe_score = ssim(img, basic_lhe(img, 2), scfg)
        for final in finals.values():
            assert final >= max(start_scores)
            assert final >= lhe_score
        assert abs(finals["midpoint"] - finals["min_mse"]) <= 0.01


def test_c5_stark_reductions(cameraman):
    with criterion(5, "SPL alpha=1 is the input and alpha=0 is basic LHE, within 1 GL", 10.0):
        for img in (cameraman, synthetic_image()):
            for w in (2, 8):
                one = stark_enhance(img, StarkConfig(1.0, w))
                assert np.max(np.abs(one.pixels - img.pixels)) <= 1
                zero = stark_enhance(img, StarkConfig(0.0, w))
                assert np.max(np.abs(zero.pixels - basic_lhe(img, w).pixels)) <= 1


@pytest.fixture(scope="module")
def trade_off(cameraman):
    t = time.perf_counter()
    runs = {w: sweep(cameraman, SWEEP_ALPHAS, w) for w in (2, 8)}
    return runs, time.perf_counter() - t


def _ssim_gaps(records):
    by = {(r.method, r.alpha): r for r in records}
    return [by["stark_ssim_opt", a].ssim - by["stark", a].ssim for a in SWEEP_ALPHAS]


def test_c6_trade_off_reproduction(trade_off):
    runs, sweep_time = trade_off
    with criterion(6, "trade-off sweep: dominance, 5% energy band, window-size effect",
                   600.0, spent=sweep_time):
        failures = []
        by = {(r.method, r.alpha): r for r in runs[2]}
        for a in SWEEP_ALPHAS:
            base = by["stark", a]
            if by["stark_mse_opt", a].psnr_db < base.psnr_db:
                failures.append(f"psnr dominance at alpha={a}")
            if by["stark_ssim_opt", a].ssim < base.ssim:
                failures.append(f"ssim dominance at alpha={a}")
            for m in ("stark_mse_opt", "stark_ssim_opt"):
                ratio = by[m, a].local_energy / base.local_energy
                if abs(ratio - 1) > 0.05:
                    failures.append(f"{m} energy ratio {ratio:.3f} at alpha={a}")
        gap5, gap17 = np.mean(_ssim_gaps(runs[2])), np.mean(_ssim_gaps(runs[8]))
        if not gap17 < gap5:
            failures.append(f"mean SSIM gap 17x17 {gap17:.4f} not below 5x5 {gap5:.4f}")
        print(f"mean SSIM gap 5x5={gap5:.4f} 17x17={gap17:.4f}")
        assert not failures, "; ".join(failures)


def test_c7_solution_space_size():
    with criterion(7, "solution-space size in log2", 1.0):
        assert solution_space_log2(dof_bounds(GrayImage(np.full((3, 3), 17)), 1)) == 72.0
        z = np.full((5, 6), 9)
        assert solution_space_log2(BoundsField(z, z)) == 0.0


def _digest(paths):
    return {os.path.basename(p): hashlib.sha256(open(p, "rb").read()).hexdigest() for p in paths}


def _run_cli(workdir, src, threads):
    env = dict(os.environ)
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        env[var] = str(threads)
    os.makedirs(workdir, exist_ok=True)
    cli = [sys.executable, "-m", "lhedof"]
    out = lambda name: os.path.join(workdir, name)  # noqa: E731
    commands = [
        ["lhe", "--in", src, "--out", out("lhe.pgm"), "-w", "2"],
        ["ssim-opt", "--in", src, "--out", out("ssim.pgm"), "-w", "2", "--iters", "10"],
        ["stark", "--in", src, "--out", out("stark.pgm"), "-w", "2", "--alpha", "0.4",
         "--optimize", "ssim", "--iters", "10"],
        ["sweep", "--in", src, "-w", "2", "--alphas", "0,0.5,1", "--iters", "5",
         "--csv", out("sweep.csv"), "--plot", out("sweep.svg")],
    ]
    for args in commands:
        subprocess.run(cli + args, check=True, env=env, capture_output=True)
    return _digest([out(n) for n in ("lhe.pgm", "ssim.pgm", "stark.pgm", "sweep.csv", "sweep.svg")])


def test_c8_determinism(cameraman, tmp_path):
    from lhedof.pgm import write_pgm

    src = str(tmp_path / "in.pgm")
    write_pgm(GrayImage(cameraman.pixels[32:96, 32:96]), src)
    with criterion(8, "byte-identical rasters, CSV and SVG across runs and thread counts", 120.0):
        first = _run_cli(str(tmp_path / "a"), src, 1)
        second = _run_cli(str(tmp_path / "b"), src, 1)
        threaded = _run_cli(str(tmp_path / "c"), src, 4)
        assert first == second == threaded
        # in-process repeat of the report writers
        records = sweep(GrayImage(cameraman.pixels[:40, :40]), [0.0, 1.0], 1, OptimizerConfig(max_iters=3))
        assert emit_csv(records) == emit_csv(records)
        assert emit_plot(records) == emit_plot(records)
