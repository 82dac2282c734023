"""Thermodynamics of the damped oscillator from its partition function."""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .bath import drude_poles, log_chi_derivative_im
from .fluctuations import moments
from .gaussian_state import bose_entropy, entropy_from_purity
from .numerics import integrate_semi_infinite, log_gamma_complex, resonance_ladder

FD_STEP = 1e-4


class ConsistencyError(ArithmeticError):
    """Two independent routes to the same quantity disagree."""


@dataclass(frozen=True)
class ThermoPoint:
    T: float
    Z: float
    F: float
    S: float
    U: float
    C: float
    U_int: float


@dataclass(frozen=True)
class VariationReport:
    parameter: str
    delta: float
    dF: float
    dS: float
    dQ: float
    dW_s: float
    dQ_s: float
    dU_int: float
    d_mean_energy: float


class EntropyComparison(NamedTuple):
    S_thermo: float
    S_vN: float
    mutual_information: float


def central_diff(f, x, h, richardson=True):
    """Centered derivative of ``f`` at ``x``; one Richardson step if asked."""
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    if not richardson:
        return d1
    d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0


# --- partition function ---------------------------------------------------

def log_partition_function(T, p):
    """ln Z from the Gamma-function product over the three Drude poles."""
    if not T > 0:
        raise ValueError("partition function needs T > 0; use the T -> 0 limits of F, S")
    nu = 2.0 * math.pi * T
    poles = drude_poles(p)
    acc = math.log(p.omega0 / nu) - math.log(2.0 * math.pi)
    if poles.is_complex_pair:
        acc += log_gamma_complex(poles.lam[0].real / nu).real
        acc += 2.0 * log_gamma_complex(poles.lam[1] / nu).real
    else:
        acc += sum(float(special.gammaln(l.real / nu)) for l in poles.lam)
    acc -= float(special.gammaln(p.cutoff / nu))
    return acc


def partition_function(T, p):
    return math.exp(log_partition_function(T, p))


def matsubara_log_partition_function(T, p, n_terms=20000):
    """ln Z from the truncated Matsubara product plus its asymptotic tail."""
    if not T > 0:
        raise ValueError("T must be positive")
    nu = 2.0 * math.pi * T
    v = nu * np.arange(1, n_terms + 1, dtype=np.float64)
    extra = p.omega0 ** 2 + v * p.gamma * p.cutoff / (p.m * (v + p.cutoff))
    acc = -np.sum(np.log1p(extra / (v * v))[::-1])
    # -ln(1 + c2/v^2 - c3/v^3 + ...) = -c2/v^2 + c3/v^3 + O(v^-4)
    c2 = p.omega0 ** 2 + p.gamma * p.cutoff / p.m
    c3 = p.gamma * p.cutoff ** 2 / p.m
    n1 = n_terms + 1
    acc += -c2 * float(special.polygamma(1, n1)) / nu ** 2
    acc += c3 * (-0.5 * float(special.polygamma(2, n1))) / nu ** 3
    return math.log(T / p.omega0) + acc


# --- spectral integrals ---------------------------------------------------

def _spectral_breakpoints(p, T, poles):
    top = 10.0 * max(p.scale, T)
    pts = [p.omega0]
    for lam in poles.lam:
        if lam.imag > 0:
            pts += resonance_ladder(lam.imag, lam.real, 0.0, top)
    if T > 0:
        pts += [T, 10.0 * T, 40.0 * T]
    return [x for x in pts if 0 < x < top]


def _phase_integral(weight, T, p, spec=None):
    """(1/pi) int weight(w) Im dln chi/dw dw."""
    if p.gamma == 0.0:
        # the phase derivative collapses to pi delta(w - w0)
        return float(np.asarray(weight(np.array([p.omega0])))[0])
    poles = drude_poles(p)

    def integrand(w):
        return weight(w) * log_chi_derivative_im(w, p, poles)

    res = integrate_semi_infinite(integrand, spec, scale=max(p.scale, T),
                                  breakpoints=_spectral_breakpoints(p, T, poles),
                                  context={"T": T, "params": p})
    return res.value / math.pi


def oscillator_free_energy(w, T):
    """kT ln[2 sinh(w/2kT)]; w/2 at T = 0."""
    w = np.asarray(w, dtype=np.float64)
    if T <= 0:
        return 0.5 * w
    return 0.5 * w + T * np.log(-np.expm1(-w / T))


def free_energy(T, p, route=None, spec=None):
    """F(T). Route ``"gamma"`` (-kT ln Z) is used for T > 0, ``"integral"``
    (phase-derivative integral over oscillator free energies) at T = 0."""
    if T < 0:
        raise ValueError("T must be non-negative")
    if route is None:
        route = "gamma" if T > 0 else "integral"
    if route == "gamma":
        return -T * log_partition_function(T, p)
    if route == "integral":
        return _phase_integral(lambda w: oscillator_free_energy(w, T), T, p, spec)
    raise ValueError(f"unknown route {route!r}")


def entropy(T, p, spec=None):
    """S(T) in units of k from the phase-derivative integral of s(w, T)."""
    if T < 0:
        raise ValueError("T must be non-negative")
    if T == 0:
        return 0.0
    return _phase_integral(lambda w: bose_entropy(w / T), T, p, spec)


def entropy_from_free_energy(T, p, rel_step=FD_STEP):
    """-dF/dT by centered differences; validation route for :func:`entropy`."""
    h = rel_step * T
    return -central_diff(lambda t: free_energy(t, p), T, h)


def internal_energy(T, p, spec=None):
    if T == 0:
        return free_energy(0.0, p, spec=spec)
    return free_energy(T, p) + T * entropy(T, p, spec)


def specific_heat(T, p, rel_step=FD_STEP, spec=None):
    if T == 0:
        return 0.0
    h = rel_step * T
    return T * central_diff(lambda t: entropy(t, p, spec), T, h)


def interaction_energy(T, p, spec=None, check=True, rel_step=FD_STEP):
    """U_int = U - <H_s>; cross-checked against cutoff * dF/dcutoff."""
    u_int = internal_energy(T, p, spec) - moments(T, p, spec).mean_energy
    if check:
        alt = interaction_energy_cutoff_derivative(T, p, rel_step, spec)
        tol = 1e-4 * max(abs(u_int), 1e-3 * p.omega0)
        if abs(u_int - alt) > tol:
            raise ConsistencyError(
                f"U_int routes disagree at T={T}, {p}: {u_int!r} vs {alt!r}")
    return u_int


def interaction_energy_cutoff_derivative(T, p, rel_step=FD_STEP, spec=None):
    h = rel_step * p.cutoff
    route = "gamma" if T > 0 else "integral"
    dfdc = central_diff(lambda c: free_energy(T, p.replace(cutoff=c), route, spec),
                        p.cutoff, h)
    return p.cutoff * dfdc


def thermo_point(T, p, spec=None):
    z = partition_function(T, p) if T > 0 else math.nan
    F = free_energy(T, p, spec=spec)
    S = entropy(T, p, spec)
    U = F + T * S
    C = specific_heat(T, p, spec=spec)
    u_int = U - moments(T, p, spec).mean_energy
    return ThermoPoint(T=T, Z=z, F=F, S=S, U=U, C=C, U_int=u_int)


def entropy_comparison(T, p, spec=None):
    s_th = entropy(T, p, spec)
    mom = moments(T, p, spec)
    s_vn = entropy_from_purity(0.5 / math.sqrt(mom.q2 * mom.p2))
    return EntropyComparison(s_th, s_vn, s_vn - s_th)


# --- quasi-static parameter variations ------------------------------------

def _work_derivative(which, p, mom):
    if which == "omega0":
        return p.m * p.omega0 * mom.q2
    return -mom.p2 / (2.0 * p.m ** 2) + 0.5 * p.omega0 ** 2 * mom.q2


def quasi_static_variation(T, p, which="omega0", delta=FD_STEP, spec=None,
                           tol=1e-5, retries=3):
    """Heat/work bookkeeping for a small change of ``omega0`` or ``m``.

    All differentials are derivative times the step h = delta * value.
    """
    if which not in ("omega0", "m"):
        raise ValueError("which must be 'omega0' or 'm'")
    base = getattr(p, which)
    for _ in range(retries + 1):
        h = delta * base

        def at(v):
            q = p.replace(**{which: v})
            mom = moments(T, q, spec)
            F = free_energy(T, q, spec=spec)
            S = entropy(T, q, spec)
            return F, S, F + T * S - mom.mean_energy, mom.mean_energy

        plus, minus = at(base + h), at(base - h)
        dF, dS, dU_int, dH = ((a - b) / 2.0 for a, b in zip(plus, minus))
        dW = _work_derivative(which, p, moments(T, p, spec)) * h
        dQ_s = dH - dW
        report = VariationReport(which, h, dF, dS, T * dS, dW, dQ_s, dU_int, dH)
        scale2 = max(abs(report.dQ), abs(dQ_s), abs(dU_int))
        ok1 = abs(dF - dW) <= tol * max(abs(dF), 1e-300)
        ok2 = abs(report.dQ - (dQ_s + dU_int)) <= tol * max(scale2, 1e-300)
        if ok1 and ok2:
            return report
        delta *= 0.5
    raise ConsistencyError(f"heat bookkeeping violated for {which} variation at T={T}: {report}")
