"""Disturbance-based measure of macroscopic quantum coherence."""

from .core import (
    CoarseChannel,
    DensityMatrix,
    DistanceMeasure,
    FreeOperation,
    ObservableSpectrum,
    apply_channel,
    apply_free,
    measure_M,
    mode_decompose,
    projective_dephase,
    pure_state_fidelity_fast,
    pure_state_measure,
)
from .info import (
    bound_f,
    bound_w,
    bound_w_pure,
    fisher_information,
    sandwich_check,
    skew_information,
    variance,
)
from .numerics import bures_distance, fidelity, relative_entropy

__version__ = "0.1.0"

__all__ = [
    "CoarseChannel", "DensityMatrix", "DistanceMeasure", "FreeOperation", "ObservableSpectrum",
    "apply_channel", "apply_free", "measure_M", "mode_decompose", "projective_dephase",
    "pure_state_fidelity_fast", "pure_state_measure",
    "bound_f", "bound_w", "bound_w_pure", "fisher_information", "sandwich_check", "skew_information", "variance",
    "bures_distance", "fidelity", "relative_entropy",
]
