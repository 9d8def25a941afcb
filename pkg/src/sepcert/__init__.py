"""Spectral separability certificates for finite composite quantum systems."""

__version__ = "0.1.0"

from .state import (  # noqa: E402
    CompositeDims,
    DensityMatrix,
    StateValidationError,
    maximally_mixed,
    mix_with_trace,
    pure_state,
    spectrum,
    validate,
)
from .composite import is_ppt, marginal, partial_transpose, tensor  # noqa: E402
from .modulus import estimate_modulus, l_constant, modulus_ppt  # noqa: E402
from .detectors import run_detectors  # noqa: E402
from .thermal import Hamiltonian, gibbs, thermal_window  # noqa: E402

__all__ = [
    "CompositeDims",
    "DensityMatrix",
    "Hamiltonian",
    "StateValidationError",
    "estimate_modulus",
    "gibbs",
    "is_ppt",
    "l_constant",
    "marginal",
    "maximally_mixed",
    "mix_with_trace",
    "modulus_ppt",
    "partial_transpose",
    "pure_state",
    "run_detectors",
    "spectrum",
    "tensor",
    "thermal_window",
    "validate",
]
