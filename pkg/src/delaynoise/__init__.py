"""Delay equations driven by Ornstein-Uhlenbeck noise and their white-noise limits."""
from .errors import DelayNoiseError
from .limit import DriftKind, drift_coefficient, integrate_ito_sde, integrate_stratonovich_heun, noise_induced_drift
from .models import ModelSpec, additive, bounded2d, linear1d
from .noise import OUParams
from .sdde import DelaySchedule, PastCondition, WienerGrid, build_wiener, constant_past, integrate_sdde

__version__ = "0.1.0"

__all__ = [
    "DelayNoiseError",
    "DelaySchedule",
    "DriftKind",
    "ModelSpec",
    "OUParams",
    "PastCondition",
    "WienerGrid",
    "additive",
    "bounded2d",
    "build_wiener",
    "constant_past",
    "drift_coefficient",
    "integrate_ito_sde",
    "integrate_sdde",
    "integrate_stratonovich_heun",
    "linear1d",
    "noise_induced_drift",
]
