"""Degrees of freedom of local histogram equalization.

Computes the per-pixel interval of valid LHE outputs and picks, inside that
space, the output closest to the input in PSNR or SSIM.
"""

from .core import GrayImage, local_mean, local_variance
from .dof import (BoundsField, TargetCumHist, basic_lhe, dof_bounds, dof_bounds_specified,
                  rank_range, solution_space_log2)
from .harness import SweepRecord, emit_csv, sweep, total_local_energy
from .mse import max_mse_solution, min_mse_solution, psnr
from .optimize import OptimizerConfig, OptTrace, beta0, beta_search, init_solution, maximize_ssim, project
from .pgm import read_pgm, write_pgm
from .ssim import SsimConfig, ssim, ssim_gradient, ssim_map
from .stark import StarkConfig, enhance_stark, spl_map, stark_bounds, stark_enhance

__version__ = "0.1.0"
