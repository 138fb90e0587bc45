"""Waveguide lattices with quadratic propagation constants and their Bragg/Mathieu equivalents."""

__version__ = "0.1.0"

from .bragg import BraggConfig, BraggState, frame_map, integrate_bragg, raman_nath_profile, verify_equivalence
from .errors import (
    ConfigurationError,
    ContaminatedModeError,
    DomainError,
    LabelingError,
    MathieuLatticeError,
    NumericError,
)
from .mathieu_eval import MathieuFunction, classical_form, eval_cse, ode_residual
from .propagator import FieldState, PropagationResult, integrate_direct, kernel_element, observables, propagate
from .spectrum import (
    LatticeConfig,
    SpectralBasis,
    TruncatedOperator,
    build_operator,
    mathieu_characteristics,
    solve_spectrum,
    spectral_bases,
    spectral_basis,
    stability_chart,
)

__all__ = [
    "BraggConfig",
    "BraggState",
    "ConfigurationError",
    "ContaminatedModeError",
    "DomainError",
    "FieldState",
    "LabelingError",
    "LatticeConfig",
    "MathieuFunction",
    "MathieuLatticeError",
    "NumericError",
    "PropagationResult",
    "SpectralBasis",
    "TruncatedOperator",
    "build_operator",
    "classical_form",
    "eval_cse",
    "frame_map",
    "integrate_bragg",
    "integrate_direct",
    "kernel_element",
    "mathieu_characteristics",
    "observables",
    "ode_residual",
    "propagate",
    "raman_nath_profile",
    "solve_spectrum",
    "spectral_bases",
    "spectral_basis",
    "stability_chart",
    "verify_equivalence",
]
