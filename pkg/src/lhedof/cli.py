"""Command-line entry point.

Exit status: 0 on success, 1 on usage errors, 2 on I/O or format errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from . import __version__
from .dof import basic_lhe, dof_bounds, solution_space_log2
from .harness import emit_csv, evaluate, sweep
from .mse import max_mse_solution, min_mse_solution
from .optimize import OptimizerConfig, maximize_ssim
from .pgm import PGMError, read_pgm, write_pgm
from .ssim import SsimConfig
from .stark import StarkConfig, enhance_stark, stark_enhance

EXIT_USAGE = 1
EXIT_IO = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_alphas(text: str) -> list[float]:
    """Comma-separated alphas; ``a,b,...,c`` expands with step ``b - a``."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if "..." in parts:
        i = parts.index("...")
        if i < 2 or i != len(parts) - 2:
            raise UsageError("'...' needs two leading values and one final value")
        head = [float(p) for p in parts[:i]]
        step = head[-1] - head[-2]
        stop = float(parts[-1])
        if step <= 0:
            raise UsageError("alpha progression must be increasing")
        n = int(math.floor((stop - head[0]) / step + 1e-9))
        values = [round(head[0] + k * step, 10) for k in range(n + 1)]
        if not math.isclose(values[-1], stop, abs_tol=1e-9):
            values.append(stop)
    else:
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise UsageError(f"cannot parse alphas {text!r}") from None
    if not values or any(not 0 <= a <= 1 for a in values):
        raise UsageError("alphas must be in [0, 1]")
    return values


def _ssim_config(args, levels=256) -> SsimConfig:
    kernel = "gaussian" if getattr(args, "kernel", "box") == "gauss" else "box"
    return SsimConfig(kernel, w=args.w, dynamic_range=levels - 1)


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(
        init={"mid": "midpoint", "minmse": "min_mse"}[args.init],
        step_policy={"beta0": "beta0", "search": "search"}[args.step],
        beta_fraction=args.beta_frac,
        max_iters=args.iters,
    )


def cmd_lhe(args):
    write_pgm(basic_lhe(read_pgm(args.input), args.w), args.out)


def cmd_dof(args):
    image = read_pgm(args.input)
    bounds = dof_bounds(image, args.w)
    if args.lower:
        write_pgm(image.with_pixels(bounds.lower), args.lower)
    if args.upper:
        write_pgm(image.with_pixels(bounds.upper), args.upper)
    if args.log2_size:
        print(f"{solution_space_log2(bounds):.6f}")


def cmd_mse(args):
    image = read_pgm(args.input)
    solve = min_mse_solution if args.command == "min-mse" else max_mse_solution
    write_pgm(solve(image, dof_bounds(image, args.w)), args.out)


def cmd_ssim_opt(args):
    image = read_pgm(args.input)
    result, trace = maximize_ssim(image, dof_bounds(image, args.w),
                                  _optimizer_config(args), _ssim_config(args))
    write_pgm(result, args.out)
    print(f"ssim {trace.final_ssim:.6f} iterations {trace.accepted_steps} stop {trace.reason}")


def cmd_stark(args):
    image = read_pgm(args.input)
    cfg = StarkConfig(args.alpha, args.w)
    if args.optimize == "none":
        result = stark_enhance(image, cfg)
    else:
        result = enhance_stark(image, cfg, args.optimize, _optimizer_config(args),
                               _ssim_config(args))
    write_pgm(result, args.out)


def cmd_metrics(args):
    ref, test = read_pgm(args.ref), read_pgm(args.test)
    if ref.shape != test.shape:
        raise UsageError("reference and test images differ in size")
    m = evaluate(ref, test, args.w, _ssim_config(args))
    print(f"psnr {m['psnr']:.6f}")
    print(f"ssim {m['ssim']:.6f}")
    print(f"local_energy {m['local_energy']:.6f}")


def cmd_sweep(args):
    alphas = parse_alphas(args.alphas)
    image = read_pgm(args.input)
    records = sweep(image, alphas, args.w, _optimizer_config(args), _ssim_config(args))
    text = emit_csv(records, args.csv)
    if args.csv is None:
        sys.stdout.write(text)
    if args.plot:
        from .plotting import emit_plot
        emit_plot(records, args.plot, y=args.y)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lhedof", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, io=True):
        p = sub.add_parser(name, help=help_text)
        if io:
            p.add_argument("--in", dest="input", required=True, metavar="PGM")
            p.add_argument("--out", required=True, metavar="PGM")
        p.add_argument("-w", type=int, default=2, help="window half-width (default 2)")
        p.set_defaults(func=func)
        return p

    def add_optimizer(p):
        p.add_argument("--init", choices=["mid", "minmse"], default="minmse")
        p.add_argument("--step", choices=["beta0", "search"], default="search")
        p.add_argument("--beta-frac", type=float, default=0.5)
        p.add_argument("--iters", type=int, default=50)
        p.add_argument("--kernel", choices=["box", "gauss"], default="box")

    add("lhe", cmd_lhe, "classic local histogram equalization")

    p = add("dof", cmd_dof, "per-pixel DoF bounds", io=False)
    p.add_argument("--in", dest="input", required=True, metavar="PGM")
    p.add_argument("--lower", metavar="PGM")
    p.add_argument("--upper", metavar="PGM")
    p.add_argument("--log2-size", action="store_true", help="print log2 of the solution count")

    add("min-mse", cmd_mse, "LHE solution with the highest PSNR")
    add("max-mse", cmd_mse, "LHE solution with the lowest PSNR")
    add_optimizer(add("ssim-opt", cmd_ssim_opt, "LHE solution maximising SSIM"))

    p = add("stark", cmd_stark, "SPL enhancement, optionally re-optimised")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--optimize", choices=["none", "mse", "ssim"], default="none")
    add_optimizer(p)

    p = add("metrics", cmd_metrics, "PSNR, SSIM and local energy", io=False)
    p.add_argument("--ref", required=True, metavar="PGM")
    p.add_argument("--test", required=True, metavar="PGM")
    p.add_argument("--kernel", choices=["box", "gauss"], default="box")

    p = add("sweep", cmd_sweep, "trade-off sweep over alpha", io=False)
    p.add_argument("--in", dest="input", required=True, metavar="PGM")
    p.add_argument("--alphas", default="0,0.1,...,1")
    p.add_argument("--csv", metavar="FILE", help="CSV destination (stdout if omitted)")
    p.add_argument("--plot", metavar="SVG")
    p.add_argument("--y", choices=["psnr", "ssim"], default="ssim")
    add_optimizer(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (PGMError, OSError) as exc:
        print(f"lhedof: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        print(f"lhedof: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
