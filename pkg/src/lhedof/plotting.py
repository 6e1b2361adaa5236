"""Trade-off figure: local energy against similarity, one line per method.

Output is byte-reproducible: the SVG id salt is fixed and the date
metadata is dropped.
"""

from __future__ import annotations

import io
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import METHODS, sort_records  # noqa: E402

STYLE = {
    "svg.hashsalt": "lhedof",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.5,
    "lines.markersize": 5,
}

LABELS = {
    "stark": "SPL",
    "stark_mse_opt": "SPL, PSNR-optimised",
    "stark_ssim_opt": "SPL, SSIM-optimised",
}

Y_AXES = {"psnr": ("psnr_db", "PSNR vs input (dB)"), "ssim": ("ssim", "SSIM vs input")}


def series_id(method: str) -> str:
    return f"series-{method}"


def emit_plot(records, destination: str | os.PathLike | None = None, y: str = "ssim") -> str:
    """Draw the sweep as SVG, write it to ``destination`` if given, and return it.

    ``y`` picks the similarity axis: ``"psnr"`` or ``"ssim"``. Points with an
    infinite PSNR (output identical to the input) are left out.
    """
    if not records:
        raise ValueError("nothing to plot")
    if y not in Y_AXES:
        raise ValueError(f"y must be one of {sorted(Y_AXES)}")
    field, ylabel = Y_AXES[y]

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 4.5))
        records = sort_records(records)
        methods = [m for m in METHODS if any(r.method == m for r in records)]
        methods += sorted({r.method for r in records} - set(methods))
        for method in methods:
            pts = [(r.local_energy, getattr(r, field), r.alpha) for r in records
                   if r.method == method and math.isfinite(getattr(r, field))]
            if not pts:
                continue
            xs, ys, alphas = zip(*pts)
            (line,) = ax.plot(xs, ys, marker="o", label=LABELS.get(method, method),
                              linestyle="-" if len(pts) > 1 else "none")
            line.set_gid(series_id(method))
            for xv, yv, a in pts:
                ax.annotate(f"{a:g}", (xv, yv), textcoords="offset points", xytext=(3, 3),
                            fontsize=7, color=line.get_color())
        ax.set_xlabel("total local energy")
        ax.set_ylabel(ylabel)
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()

        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)

    text = buf.getvalue()
    if destination is not None:
        with open(destination, "w") as fh:
            fh.write(text)
    return text
