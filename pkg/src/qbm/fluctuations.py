"""Stationary second moments of the Brownian oscillator from the FDT."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import kernels
from .bath import drude_poles, im_susceptibility
from .numerics import coth_half, integrate_semi_infinite, resonance_ladder


@dataclass(frozen=True)
class EquilibriumMoments:
    T: float
    q2: float
    p2: float
    mean_energy: float


def breakpoints(p, T=0.0, poles=None):
    """Points where FDT integrands change character: resonance +- widths, T."""
    poles = poles or drude_poles(p)
    pts = [p.omega0]
    top = 10.0 * max(p.scale, T)
    for lam in poles.lam[1:]:
        if lam.imag > 0:
            pts += resonance_ladder(lam.imag, lam.real, 0.0, top)
    if T > 0:
        pts += [T, 10 * T]
    return sorted({x for x in pts if x > 0})


def _thermal_factor(w, T):
    return coth_half(w / T) if T > 0 else np.ones_like(w)


def _fdt_integral(weight, T, p, spec):
    if T < 0:
        raise ValueError(f"temperature must be non-negative, got {T}")
    if p.gamma == 0.0:
        # Im chi -> pi delta(w - w0) / (2 m w0)
        w0 = np.array([p.omega0])
        return float((weight(w0) * _thermal_factor(w0, T))[0]) / (2.0 * p.m * p.omega0)

    def integrand(w):
        return weight(w) * _thermal_factor(w, T) * im_susceptibility(w, p)

    res = integrate_semi_infinite(integrand, spec, scale=max(p.scale, T),
                                  breakpoints=breakpoints(p, T),
                                  context={"T": T, "params": p})
    return res.value / math.pi


def position_variance(T, p, spec=None):
    """<q^2> = (1/pi) int coth(w/2T) Im chi(w) dw."""
    return _fdt_integral(np.ones_like, T, p, spec)


def momentum_variance(T, p, spec=None):
    """<p^2> = (1/pi) int m^2 w^2 coth(w/2T) Im chi(w) dw."""
    m2 = p.m * p.m
    return _fdt_integral(lambda w: m2 * w * w, T, p, spec)


def moments(T, p, spec=None):
    q2 = position_variance(T, p, spec)
    p2 = momentum_variance(T, p, spec)
    energy = p2 / (2.0 * p.m) + 0.5 * p.m * p.omega0 ** 2 * q2
    return EquilibriumMoments(T=T, q2=q2, p2=p2, mean_energy=energy)


def mean_energy(T, p, spec=None):
    return moments(T, p, spec).mean_energy


def matsubara_position_variance(T, p, n_terms=2000, tail_correction=True):
    """<q^2> as a Matsubara sum; independent of the quadrature route.

    Beyond ``n_terms`` a term expands as
    1/nu_n^2 - (w0^2 + gamma*cutoff/m)/nu_n^4 + O(nu_n^-5) (the nu^-3 piece
    cancels for the Drude kernel); both leading pieces are summed in closed
    form with polygamma functions.
    """
    if not T > 0:
        raise ValueError("Matsubara sum needs T > 0; use position_variance at T = 0")
    nu = 2.0 * math.pi * T
    w0sq = p.omega0 ** 2
    total = kernels.matsubara_partial_sum(nu, int(n_terms), w0sq, p.gamma / p.m, p.cutoff)
    if tail_correction:
        n1 = n_terms + 1
        c4 = w0sq + p.gamma * p.cutoff / p.m
        total += (float(special.polygamma(1, n1)) / nu ** 2
                  - c4 * float(special.polygamma(3, n1)) / 6.0 / nu ** 4)
    return T / p.m * (1.0 / w0sq + 2.0 * total)
