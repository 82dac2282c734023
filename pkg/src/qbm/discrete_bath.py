"""Finite Caldeira-Leggett bath diagonalized exactly; the brute-force oracle.

N bath oscillators on an equidistant grid couple bilinearly to the system with
c_i = sqrt(2 delta m_i w_i J(w_i) / pi); the counter-term keeps the bare
potential mw0^2 q^2 / 2 as the Schur complement, so the coupled quadratic
form is positive definite for any coupling.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .bath import spectral_density
from .thermo import oscillator_free_energy

DEFAULT_SPAN = 20.0


class ModelError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DiscreteBath:
    N: int
    delta: float
    omegas: np.ndarray
    couplings: np.ndarray
    masses: np.ndarray
    params: object

    @property
    def counter_term(self):
        """sum c_i^2 / (2 m_i w_i^2), the q^2 coefficient added by H_int."""
        return float(np.sum(self.couplings ** 2 / (2.0 * self.masses * self.omegas ** 2)))

    def potential_matrix(self):
        """Mass-weighted Hessian of the total potential, (N+1) x (N+1)."""
        p = self.params
        n = self.N
        k = np.zeros((n + 1, n + 1))
        k[0, 0] = p.omega0 ** 2 + 2.0 * self.counter_term / p.m
        off = -self.couplings / np.sqrt(p.m * self.masses)
        k[0, 1:] = off
        k[1:, 0] = off
        k[np.arange(1, n + 1), np.arange(1, n + 1)] = self.omegas ** 2
        return k


class NormalModes(NamedTuple):
    frequencies: np.ndarray
    # squared system-coordinate component of each mass-weighted eigenvector
    system_weight: np.ndarray
    transform: object = None


def build(N, p, span=DEFAULT_SPAN, offset=0.5):
    """Equidistant bath w_i = (i - offset) * delta, delta = span * cutoff / N.

    ``span >= 8`` keeps the Drude tail. ``offset=0`` is the right-endpoint
    grid w_i = i * delta, whose moments converge only as O(delta) (the
    lowest mode over-weights w -> 0); the default midpoint grid converges
    as O(delta^2) and leaves the span truncation as the dominant error.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if span < 8:
        raise ValueError("span must be at least 8 cutoff frequencies")
    if not 0.0 <= offset < 1.0:
        raise ValueError("offset must lie in [0, 1)")
    delta = span * p.cutoff / N
    omegas = delta * (np.arange(1, N + 1, dtype=np.float64) - offset)
    masses = np.ones(N)
    c = np.sqrt(2.0 * delta * masses * omegas * spectral_density(omegas, p) / math.pi)
    return DiscreteBath(N, delta, omegas, c, masses, p)


def normal_modes(bath, method="secular"):
    """Eigenfrequencies w'_k and system weights |v_k|^2 of the coupled system.

    ``method="secular"`` solves the arrowhead secular equation root by root
    (O(N^2)); ``"dense"`` runs a full symmetric eigensolve and also returns
    the mode matrix.
    """
    p = bath.params
    if method == "dense":
        lam, vec = np.linalg.eigh(bath.potential_matrix())
        weight = vec[0] ** 2
        transform = vec
    elif method == "secular":
        alpha = p.omega0 ** 2 + 2.0 * bath.counter_term / p.m
        b2 = bath.couplings ** 2 / (p.m * bath.masses)
        if not np.any(b2 > 0):
            lam = np.concatenate(([p.omega0 ** 2], bath.omegas ** 2))
            weight = np.zeros(bath.N + 1)
            weight[0] = 1.0
            order = np.argsort(lam)
            lam, weight = lam[order], weight[order]
        else:
            # positive definite iff the Schur complement on the system is
            # positive; the secular brackets assume eigenvalues in (0, inf)
            schur = alpha - float(np.sum(b2 / bath.omegas ** 2))
            if schur <= 0:
                raise ModelError(f"Schur complement {schur:.3g} <= 0: potential not "
                                 "positive definite (counter-term missing?)")
            lam, weight = kernels.arrowhead_eigen(alpha, bath.omegas ** 2, b2)
        transform = None
    else:
        raise ValueError(f"unknown method {method!r}")
    if lam.min() <= 0:
        raise ModelError(f"non-positive eigenvalue {lam.min():.3g}: potential not "
                         "positive definite (counter-term missing or N too small)")
    return NormalModes(np.sqrt(lam), weight, transform)


def _coth_half(x):
    return 1.0 + 2.0 / np.expm1(np.minimum(x, 700.0))


def exact_moments(bath, T, modes=None):
    """(<q^2>, <p^2>) as normal-mode thermal averages."""
    modes = modes or normal_modes(bath)
    w = modes.frequencies
    th = np.ones_like(w) if T <= 0 else _coth_half(w / T)
    m = bath.params.m
    q2 = float(np.sum(modes.system_weight * th / (2.0 * w))) / m
    p2 = float(np.sum(modes.system_weight * th * w / 2.0)) * m
    return q2, p2


class FreeEnergies(NamedTuple):
    F_tot: float
    F_b: float

    @property
    def shift(self):
        return self.F_tot - self.F_b


def exact_total_free_energy(bath, T, modes=None):
    """Sum of oscillator free energies over coupled and over bare bath modes;
    zero-point energies w/2 at T = 0."""
    if T < 0:
        raise ValueError("T must be non-negative")
    modes = modes or normal_modes(bath)
    f_tot = float(np.sum(oscillator_free_energy(modes.frequencies, T)))
    f_b = float(np.sum(oscillator_free_energy(bath.omegas, T)))
    return FreeEnergies(f_tot, f_b)
