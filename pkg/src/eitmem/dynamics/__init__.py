"""Light-storage dynamics: integrator, control optimization, efficiency sweeps."""

from .backend import HAVE_COMPILED, available_backends, get_stepper
from .control import (
    DepthSweepRow,
    OptimizeResult,
    bandwidth_matched_control,
    default_input_envelope,
    efficiency_vs_depth,
    optimal_retrieval_mode,
    optimize_control,
    readout_control,
    shaped_storage_control,
    sweep_to_csv,
    total_efficiency,
)
from .model import (
    AdiabaticityCheck,
    ControlSchedule,
    EvolveResult,
    FieldEnvelope,
    GridResolutionError,
    MediumParams,
    SpinWaveProfile,
    check_adiabaticity,
    evolve,
    spin_decay_factor,
    storage_retrieval_efficiency,
)

__all__ = [
    "AdiabaticityCheck",
    "ControlSchedule",
    "DepthSweepRow",
    "EvolveResult",
    "FieldEnvelope",
    "GridResolutionError",
    "HAVE_COMPILED",
    "MediumParams",
    "OptimizeResult",
    "SpinWaveProfile",
    "available_backends",
    "bandwidth_matched_control",
    "check_adiabaticity",
    "default_input_envelope",
    "efficiency_vs_depth",
    "evolve",
    "get_stepper",
    "optimal_retrieval_mode",
    "optimize_control",
    "readout_control",
    "shaped_storage_control",
    "spin_decay_factor",
    "storage_retrieval_efficiency",
    "sweep_to_csv",
    "total_efficiency",
]
