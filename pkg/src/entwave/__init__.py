"""Numerical laboratory for planar viscous entropy waves on a channel.

Builds the self-similar viscous wave and its diffusion-wave-corrected
ansatz, evolves perturbed 3-d compressible flow on R x T^2 with a hybrid
finite-difference/spectral scheme, and measures the structural conditions,
transformation identities, and time-decay rates of the perturbations.
"""

from .gas import (
    EndStates,
    EigenStructure,
    GasParams,
    StatePoint,
    eigenstructure_1d,
    flux_jacobian_1d,
    primitive_from_conserved,
    solve_endstates,
    structural_conditions,
)
from .profile import (
    ProfileTable,
    WaveSample,
    gaussian_fit_derivative,
    sample_wave,
    solve_selfsimilar,
)

__all__ = [
    "EndStates",
    "EigenStructure",
    "GasParams",
    "StatePoint",
    "ProfileTable",
    "WaveSample",
    "eigenstructure_1d",
    "flux_jacobian_1d",
    "gaussian_fit_derivative",
    "primitive_from_conserved",
    "sample_wave",
    "solve_endstates",
    "solve_selfsimilar",
    "structural_conditions",
]

__version__ = "0.1.0"
