"""Casimir pressure between pristine graphene sheets (Dirac model)."""

from .constants import ALPHA, C, HBAR, KB, ZETA3, DiracValidityWarning, PhysicalParams
from .fresnel import (ReflectionPair, k0z, r_from_conductivity, r_pair_imag,
                      r_te_real, r_tm_real)
from .lifshitz import (EvanescentSplit, PressureBreakdown, PressureError,
                       SummationConfig, compute_breakdown, default_sweep_grid,
                       ideal_metal_classical, pressure_evanescent,
                       pressure_matsubara, pressure_propagating_direct,
                       pressure_propagating_residual, sweep)
from .response import (KernelPoleError, MatsubaraPoint, PermittivityPair,
                       PolarizationComponents, ResponseError, SpectralPoint,
                       SpectralRegion, ThermalKernelParams, classify_region,
                       conductivity_to_eps, eps_imag_axis, eps_real_axis,
                       eps_to_conductivity, eps_to_polarization, eval_B,
                       eval_F, polarization_to_eps)

__version__ = "0.1.0"

__all__ = [
    "ALPHA", "C", "HBAR", "KB", "ZETA3",
    "DiracValidityWarning", "PhysicalParams",
    "ReflectionPair", "k0z", "r_from_conductivity", "r_pair_imag",
    "r_te_real", "r_tm_real",
    "EvanescentSplit", "PressureBreakdown", "PressureError",
    "SummationConfig", "compute_breakdown", "default_sweep_grid",
    "ideal_metal_classical", "pressure_evanescent", "pressure_matsubara",
    "pressure_propagating_direct", "pressure_propagating_residual", "sweep",
    "KernelPoleError", "MatsubaraPoint", "PermittivityPair",
    "PolarizationComponents", "ResponseError", "SpectralPoint",
    "SpectralRegion", "ThermalKernelParams", "classify_region",
    "conductivity_to_eps", "eps_imag_axis", "eps_real_axis",
    "eps_to_conductivity", "eps_to_polarization", "eval_B", "eval_F",
    "polarization_to_eps",
]
