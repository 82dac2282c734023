"""Equilibrium quantum Brownian motion of an oscillator in a Drude bath.

Thermodynamics from the partition function, the reduced Gaussian state of
the system, its number-basis density matrix and a finite-bath oracle.
"""
from ._accel import backend
from .bath import BathParams, DrudePoles, drude_poles, spectral_density, susceptibility
from .discrete_bath import DiscreteBath, build as build_discrete_bath, normal_modes
from .fluctuations import EquilibriumMoments, moments, position_variance, momentum_variance
from .gaussian_state import (GaussianState, TruncationWarning, from_bath, number_basis_block,
                             number_basis_diagonals, squeezed_vacuum, thermal_state,
                             von_neumann_entropy)
from .landauer import LandauerPoint, landauer_ratio, landauer_sweep
from .numerics import QuadratureError, QuadratureSpec
from .thermo import (entropy, entropy_comparison, free_energy, internal_energy,
                     partition_function, quasi_static_variation, thermo_point)
from .tuning import gamma_for_energy, gamma_for_occupation

__version__ = "0.1.0"

__all__ = [
    "backend", "BathParams", "DrudePoles", "drude_poles", "spectral_density", "susceptibility",
    "DiscreteBath", "build_discrete_bath", "normal_modes", "EquilibriumMoments", "moments",
    "position_variance", "momentum_variance", "GaussianState", "TruncationWarning", "from_bath",
    "number_basis_block", "number_basis_diagonals", "squeezed_vacuum", "thermal_state",
    "von_neumann_entropy", "LandauerPoint", "landauer_ratio", "landauer_sweep", "QuadratureError",
    "QuadratureSpec", "entropy", "entropy_comparison", "free_energy", "internal_energy",
    "partition_function", "quasi_static_variation", "thermo_point", "gamma_for_energy",
    "gamma_for_occupation",
]
