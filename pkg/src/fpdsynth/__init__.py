"""Synthesis and simulation of N-way coupled-resonator filtering power dividers."""

from .cmatrix import (
    NormalizedCouplingMatrix,
    SweepResult,
    apply_uniform_loss,
    evaluate,
    fold_equivalent_filter,
    metrics,
    normalize,
    sweep,
)
from .prototype import GValues, PrototypeSpec, compute_g_values, preset, ripple_from_return_loss
from .synthesis import PAPER_SPEC, CouplingPlan, DividerSpec, build_coupling_plan, refine_couplings

__version__ = "0.1.0"
