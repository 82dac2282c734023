"""Reduced Gaussian state of the Brownian oscillator.

Purity, spectrum, von Neumann entropy, the effective thermal oscillator,
number-basis matrix elements and occupation statistics. Positions are made
dimensionless with b = sqrt(m w0 / hbar) of the *bare* oscillator, whose
eigenstates |n> form the number basis.
"""
import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import kernels
from .fluctuations import moments
from .numerics import legendre_p

STATS_TOL = 1e-14
TAIL_TOL = 1e-10
MAX_BLOCK = 200


class TruncationWarning(UserWarning):
    """Number-basis truncation leaves visible probability outside the block."""

    def __init__(self, message, suggested_n_max=None):
        super().__init__(message)
        self.suggested_n_max = suggested_n_max


class ConsistencyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean Gaussian state with <q^2>, <p^2> and no q-p correlation."""

    q2: float
    p2: float
    m: float = 1.0
    omega0: float = 1.0

    def __post_init__(self):
        if not (self.q2 > 0 and self.p2 > 0):
            raise ValueError(f"variances must be positive, got q2={self.q2}, p2={self.p2}")
        if self.q2 * self.p2 < 0.25 * (1.0 - 1e-10):
            raise ValueError(f"q2 * p2 = {self.q2 * self.p2} violates the uncertainty relation")

    @property
    def b2(self):
        return self.m * self.omega0

    @cached_property
    def x(self):
        return 2.0 * self.b2 * self.q2

    @cached_property
    def y(self):
        return 2.0 * self.p2 / self.b2

    @cached_property
    def D(self):
        return (1.0 + self.x) * (1.0 + self.y)

    @cached_property
    def a(self):
        return (self.y - self.x) / self.D

    @cached_property
    def d(self):
        return (self.x * self.y - 1.0) / self.D

    @cached_property
    def mu(self):
        return 0.5 / math.sqrt(self.q2 * self.p2)

    @property
    def mean_occupation(self):
        """Closed form (x + y)/4 - 1/2."""
        return 0.25 * (self.x + self.y) - 0.5

    @property
    def occupation_variance(self):
        """Closed form (x^2 + y^2)/8 - 1/4."""
        return (self.x ** 2 + self.y ** 2) / 8.0 - 0.25


class SpectralDecomposition(NamedTuple):
    mu: float
    p_n: np.ndarray
    c: float
    n_max: int


class EffectiveOscillator(NamedTuple):
    omega_eff: float
    m_eff: float
    Z_eff: float


@dataclass
class NumberBasisBlock:
    rho: np.ndarray
    n_max: int
    trace_deficit: float = field(init=False)

    def __post_init__(self):
        self.trace_deficit = float(1.0 - np.trace(self.rho))

    def purity_sum(self):
        return float(np.sum(self.rho ** 2))

    def rows(self):
        n = self.rho.shape[0]
        for i in range(n):
            for j in range(n):
                yield i, j, float(self.rho[i, j])

    def to_csv(self, fh=None):
        """Write ``n,m,value`` rows; returns the text when no handle is given."""
        buf = fh or io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "m", "rho_nm"])
        for i, j, v in self.rows():
            w.writerow([i, j, f"{v:.17g}"])
        if fh is None:
            return buf.getvalue()

    def to_json(self):
        return json.dumps({"n_max": self.n_max, "trace_deficit": self.trace_deficit,
                           "rho": self.rho.tolist()})


# --- constructors ---------------------------------------------------------

def from_bath(T, p, spec=None):
    mom = moments(T, p, spec)
    return GaussianState(mom.q2, mom.p2, m=p.m, omega0=p.omega0)


def from_xy(x, y, m=1.0, omega0=1.0):
    b2 = m * omega0
    return GaussianState(x / (2.0 * b2), y * b2 / 2.0, m=m, omega0=omega0)


def thermal_state(n_bar, p=None):
    if n_bar < 0:
        raise ValueError("n_bar must be non-negative")
    m, w0 = (p.m, p.omega0) if p is not None else (1.0, 1.0)
    x = 2.0 * n_bar + 1.0
    return from_xy(x, x, m, w0)


def squeezed_vacuum(n_bar, p=None):
    if n_bar < 0:
        raise ValueError("n_bar must be non-negative")
    m, w0 = (p.m, p.omega0) if p is not None else (1.0, 1.0)
    r = math.asinh(math.sqrt(n_bar))
    return from_xy(math.exp(-2.0 * r), math.exp(2.0 * r), m, w0)


# --- spectrum and entropies -----------------------------------------------

def purity(s):
    return s.mu


def _check_mu(mu):
    if mu > 1.0 + 1e-12:
        raise ValueError(f"purity {mu} exceeds 1: not a physical state")
    return min(mu, 1.0)


def tail_index(mu, tol=TAIL_TOL):
    """Smallest n_max with geometric tail ((1-mu)/(1+mu))^(n_max+1) < tol."""
    mu = _check_mu(mu)
    r = (1.0 - mu) / (1.0 + mu)
    if r <= 0.0:
        return 0
    return max(0, int(math.ceil(math.log(tol) / math.log(r))) - 1)


def eigenvalues(s, n_max=None):
    mu = _check_mu(s.mu)
    if n_max is None:
        n_max = tail_index(mu)
    r = (1.0 - mu) / (1.0 + mu)
    n = np.arange(n_max + 1)
    p_n = 2.0 * mu / (1.0 + mu) * r ** n
    c = (s.p2 / s.q2) ** 0.25
    return SpectralDecomposition(mu, p_n, c, n_max)


def entropy_from_purity(mu):
    """Von Neumann entropy (units of k) of a single-mode Gaussian with purity mu."""
    mu = _check_mu(mu)
    if mu == 1.0:
        return 0.0
    return ((1.0 - mu) / (2.0 * mu) * math.log((1.0 + mu) / (1.0 - mu))
            - math.log(2.0 * mu / (1.0 + mu)))


def von_neumann_entropy(s):
    return entropy_from_purity(s.mu)


def effective_oscillator(s, T):
    """Thermal oscillator (w_eff, m_eff) at temperature T reproducing the state.

    w_eff = (2/beta) artanh(mu); the inverse hyperbolic cotangent of 1/mu.
    """
    if not T > 0:
        raise ValueError("effective oscillator needs T > 0")
    mu = _check_mu(s.mu)
    if mu >= 1.0:
        raise ValueError("pure state has no effective temperature description")
    w_eff = 2.0 * T * math.atanh(mu)
    m_eff = math.sqrt(s.p2 / s.q2) / w_eff
    z_eff = 1.0 / (2.0 * math.sinh(w_eff / (2.0 * T)))
    return EffectiveOscillator(w_eff, m_eff, z_eff)


def bose_entropy(x):
    """s = x/(e^x - 1) - ln(1 - e^-x), the entropy of an oscillator with
    level spacing x in units of kT."""
    x = np.asarray(x, dtype=np.float64)
    xs = np.maximum(x, 1e-300)
    with np.errstate(over="ignore"):
        first = np.where(xs < 700.0, xs / np.expm1(np.minimum(xs, 700.0)), 0.0)
    return first - np.log(-np.expm1(-xs))


# --- number basis ---------------------------------------------------------

def number_basis_diagonals(s, n_max):
    """rho_nn for n = 0..n_max from the Legendre closed form.

    Evaluated as sqrt(4/D) Q_n with Q_n = (d^2 - a^2)^{n/2} P_n(d/sqrt(d^2-a^2))
    generated by its real three-term recurrence, so no complex intermediates
    or division by sqrt(d^2 - a^2) appear.
    """
    w = s.d * s.d - s.a * s.a
    q = kernels.legendre_homogeneous(int(n_max), s.d, w)
    out = math.sqrt(4.0 / s.D) * q
    if out.min() < -1e-10:
        raise ConsistencyError(f"negative population {out.min():.3g}")
    return np.maximum(out, 0.0)


def number_basis_diagonal(s, n, method="recurrence"):
    """rho_nn; ``method='legendre'`` evaluates P_n at the complex argument."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if method == "recurrence":
        return float(number_basis_diagonals(s, n)[n])
    if method != "legendre":
        raise ValueError(f"unknown method {method!r}")
    w = complex(s.d * s.d - s.a * s.a)
    if w == 0:
        # limit of w^{n/2} P_n(d/sqrt(w)): leading coefficient times d^n
        lead = math.comb(2 * n, n) / 2.0 ** n
        val = complex(lead * s.d ** n)
    else:
        root = w ** 0.5
        val = root ** n * legendre_p(n, s.d / root)
    val = math.sqrt(4.0 / s.D) * val
    scale = max(abs(val), 1.0)
    if abs(val.imag) > 1e-8 * scale:
        raise ConsistencyError(f"rho_{n}{n} has imaginary residue {val.imag:.3g}")
    return max(val.real, 0.0)


def auto_n_max(s, tol=TAIL_TOL, cap=100_000):
    """Smallest N with 1 - sum_{n<=N} rho_nn < tol."""
    n = 64
    while True:
        diag = number_basis_diagonals(s, n)
        csum = np.cumsum(diag)
        hit = np.nonzero(1.0 - csum < tol)[0]
        if hit.size:
            return int(hit[0])
        if n >= cap:
            return cap
        n = min(4 * n, cap)


def _gh_rule(k):
    t, w = np.polynomial.hermite.hermgauss(k)
    # weights rescaled by e^{t^2} so the full Gaussian stays in the integrand
    return t, np.exp(np.log(w) + t * t)


def number_basis_block(s, n_max=None, enforce_parity=True):
    """rho_nm for n, m <= n_max.

    With U = (Q + Q')/2 and V = Q - Q' the Gaussian weight of the kernel
    times both Hermite functions is diagonal, exp(-(1 + 1/x) U^2 - (1 + y)
    V^2 / 4), and what remains is a polynomial of degree n + m. A tensor
    Gauss-Hermite rule with n_max + 16 nodes per axis is therefore exact up
    to rounding.
    """
    if n_max is None:
        n_max = min(auto_n_max(s), MAX_BLOCK)
    if n_max > MAX_BLOCK:
        raise ValueError(f"n_max={n_max} exceeds the supported block size {MAX_BLOCK}")
    k = n_max + 16
    t, wt = _gh_rule(k)
    au = 1.0 + 1.0 / s.x
    av = 0.25 * (1.0 + s.y)
    u = t / math.sqrt(au)
    v = t / math.sqrt(av)
    U, V = np.meshgrid(u, v, indexing="ij")
    Q1 = (U + 0.5 * V).ravel()
    Q2 = (U - 0.5 * V).ravel()
    kern = np.exp(-(U * U) / s.x - 0.25 * s.y * V * V).ravel()
    W = np.outer(wt, wt).ravel() * kern / math.sqrt(math.pi * s.x * au * av)
    A = kernels.hermite_functions(n_max, Q1)
    B = kernels.hermite_functions(n_max, Q2)
    rho = (A * W) @ B.T
    rho = 0.5 * (rho + rho.T)
    if enforce_parity:
        idx = np.add.outer(np.arange(n_max + 1), np.arange(n_max + 1))
        rho[idx % 2 == 1] = 0.0
    block = NumberBasisBlock(rho, n_max)
    if block.trace_deficit > 1e-6:
        suggested = auto_n_max(s)
        warnings.warn(TruncationWarning(
            f"trace deficit {block.trace_deficit:.3g} at n_max={n_max}; "
            f"suggest n_max={suggested}", suggested), stacklevel=2)
    return block


def occupation_statistics(s, n_max=None):
    """(mean, variance) of n from the number-basis populations.

    The default truncation is tighter than for the trace because the tail
    enters the variance weighted by n^2.
    """
    if n_max is None:
        n_max = auto_n_max(s, STATS_TOL)
    rho = number_basis_diagonals(s, n_max)
    deficit = 1.0 - rho.sum()
    if deficit > 1e-6:
        warnings.warn(TruncationWarning(
            f"trace deficit {deficit:.3g} at n_max={n_max}", auto_n_max(s)), stacklevel=2)
    n = np.arange(n_max + 1, dtype=np.float64)
    mean = float(n @ rho)
    var = float((n * n) @ rho - mean * mean)
    return mean, var


def shannon_entropy_diagonal(s, n_max=None):
    """-sum rho_nn ln rho_nn in the bare-oscillator basis."""
    if n_max is None:
        n_max = auto_n_max(s, STATS_TOL)
    rho = number_basis_diagonals(s, n_max)
    rho = rho[rho > 0]
    return float(-(rho * np.log(rho)).sum())
