"""Dual-polarization phi-OTDR simulator: Rayleigh backscatter Jones matrices,
laser and receiver noise, and SISO / SIMO / MIMO phase estimation."""

__version__ = "0.1.0"

from .estimators import PhaseTrace, Scheme, estimate, phase_mimo, phase_simo, phase_siso, unwrap
from .fiber import FiberRealization, FiberSpec, SegmentParams, backscatter_matrix, sample_fiber
from .metrics import DiffMode, StdvProfile, aggregate_mean, stdv_profile
from .noise import NoiseConfig, laser_walk, observe_channel

__all__ = [
    "DiffMode", "FiberRealization", "FiberSpec", "NoiseConfig", "PhaseTrace", "Scheme", "SegmentParams",
    "StdvProfile", "aggregate_mean", "backscatter_matrix", "estimate", "laser_walk", "observe_channel",
    "phase_mimo", "phase_simo", "phase_siso", "sample_fiber", "stdv_profile", "unwrap",
]
