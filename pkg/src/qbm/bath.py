"""Drude bath: spectral density, memory kernels, response function, poles.

Natural units hbar = k_B = 1 throughout; the system mass ``m`` is kept
explicit (default 1).
"""
import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import integrate, special

from .numerics import coth_half, cubic_roots, integrate_interval, integrate_semi_infinite


@dataclass(frozen=True)
class BathParams:
    """Brownian oscillator (m, omega0) coupled to a Drude bath (gamma, cutoff)."""

    omega0: float = 1.0
    gamma: float = 0.0
    cutoff: float = 10.0
    m: float = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")
        if not self.m > 0:
            raise ValueError(f"m must be positive, got {self.m}")
        if self.cutoff <= self.omega0:
            warnings.warn(f"Drude cutoff {self.cutoff} does not exceed omega0 "
                          f"{self.omega0}", RuntimeWarning, stacklevel=3)

    def replace(self, **changes):
        fields = dict(omega0=self.omega0, gamma=self.gamma, cutoff=self.cutoff, m=self.m)
        fields.update(changes)
        return BathParams(**fields)

    @property
    def scale(self):
        """Largest intrinsic frequency; sets quadrature split points."""
        return max(self.omega0, self.cutoff)


@dataclass(frozen=True)
class DrudePoles:
    """lambda_j with positive real part: sum = cutoff, pair sum = w0^2 +
    gamma*cutoff/m, product = w0^2*cutoff."""

    lam: Tuple[complex, complex, complex]

    @property
    def is_complex_pair(self):
        return self.lam[1].imag != 0.0

    def resonances(self):
        """Frequencies at which Im chi peaks sharply (imaginary parts of the pair)."""
        return sorted({abs(l.imag) for l in self.lam if l.imag != 0.0})


def spectral_density(omega, p):
    omega = np.asarray(omega, dtype=np.float64)
    return p.gamma * omega * p.cutoff ** 2 / (omega * omega + p.cutoff ** 2)


def damping_kernel(t, p):
    return p.gamma * p.cutoff * np.exp(-p.cutoff * np.asarray(t, dtype=np.float64))


def damping_kernel_quadrature(t, p, spec=None):
    """(2/pi) int J(w)/w cos(wt) dw; checks the closed form.

    [0, split] by adaptive Gauss-Legendre, the oscillatory algebraic tail by
    QUADPACK's Fourier-integral routine.
    """
    gc2 = p.gamma * p.cutoff ** 2

    def f(w):
        return gc2 / (w * w + p.cutoff ** 2)

    t = abs(float(t))
    if t == 0.0:
        return 2.0 / math.pi * integrate_semi_infinite(f, spec, scale=p.cutoff).value
    split = 10.0 * max(p.cutoff, 1.0 / t)
    head = integrate_interval(lambda w: f(w) * np.cos(w * t), 0.0, split, spec)
    tail = integrate.quad(f, split, np.inf, weight="cos", wvar=t)[0]
    return 2.0 / math.pi * (head.value + tail)


def damping_fourier(omega, p):
    return p.gamma * p.cutoff / (p.cutoff - 1j * np.asarray(omega, dtype=np.float64))


def inverse_susceptibility(omega, p):
    omega = np.asarray(omega, dtype=np.float64)
    return p.m * (p.omega0 ** 2 - omega * omega) - 1j * omega * damping_fourier(omega, p)


def susceptibility(omega, p):
    """chi(w) = [m(w0^2 - w^2) - i w gamma~(w)]^-1."""
    return 1.0 / inverse_susceptibility(omega, p)


def im_susceptibility(omega, p):
    """Im chi = J(w) / |chi^-1|^2, written without complex arithmetic."""
    omega = np.asarray(omega, dtype=np.float64)
    c2 = p.cutoff ** 2
    jw = p.gamma * omega * c2 / (omega * omega + c2)
    re = p.m * (p.omega0 ** 2 - omega * omega) + jw * omega / p.cutoff
    return jw / (re * re + jw * jw)


def drude_poles(p):
    # v^3 + G v^2 + (w0^2 + gamma G/m) v + w0^2 G = 0 has roots -lambda_j
    c = p.cutoff
    w2 = p.omega0 ** 2
    roots = cubic_roots(c, w2 + p.gamma * c / p.m, w2 * c)
    lam = tuple(complex(-r.real, -r.imag if r.imag else 0.0) for r in roots)
    if lam[1].imag != 0.0:
        # keep +Im first after negation
        lam = (lam[0], lam[2], lam[1])
    else:
        lam = tuple(sorted(lam, key=lambda z: z.real))
    return DrudePoles(lam)


def log_chi_derivative_im(omega, p, poles=None):
    """Im d ln chi / dw = sum_j l_j/(l_j^2 + w^2) - G/(G^2 + w^2)."""
    poles = poles or drude_poles(p)
    omega = np.asarray(omega, dtype=np.float64)
    w2 = omega * omega
    out = -p.cutoff / (p.cutoff ** 2 + w2)
    l1, l2, l3 = poles.lam
    out = out + l1.real / (l1.real ** 2 + w2)
    if poles.is_complex_pair:
        # l/(l^2+w^2) + conj, as a real expression
        a, b = l2.real, l2.imag
        re_l2 = a * a - b * b
        im_l2 = 2 * a * b
        den_re = re_l2 + w2
        den = den_re * den_re + im_l2 * im_l2
        out = out + 2.0 * (a * den_re + b * im_l2) / den
    else:
        for l in (l2, l3):
            out = out + l.real / (l.real ** 2 + w2)
    return out


def phase(omega, p, poles=None):
    """phi(w) = sum_j arctan(w/l_j) - arctan(w/G), continuous from phi(0) = 0.

    The pair contributes arg((l + i w)(l* + i w)), unwrapped along w.
    """
    poles = poles or drude_poles(p)
    omega = np.asarray(omega, dtype=np.float64)
    out = -np.arctan2(omega, p.cutoff)
    l1, l2, l3 = poles.lam
    if poles.is_complex_pair:
        out = out + np.arctan2(omega, l1.real)
        a, b = l2.real, l2.imag
        # (l + iw)(l* + iw) = a^2 + b^2 - w^2 + 2 i a w ; its argument climbs
        # from 0 to pi as w runs over [0, inf) with a > 0, so atan2 in the
        # upper half plane is already the continuous branch
        out = out + np.arctan2(2.0 * a * omega, a * a + b * b - omega * omega)
    else:
        for l in (l1, l2, l3):
            out = out + np.arctan2(omega, l.real)
    return out


def phase_quadrature(omega, p, spec=None):
    """phi(w) as the integral of Im d ln chi over [0, w]; test oracle."""
    if omega == 0:
        return 0.0
    poles = drude_poles(p)
    bps = [r for r in poles.resonances() if r < omega]
    return integrate_interval(lambda v: log_chi_derivative_im(v, p, poles), 0.0, omega,
                              spec, breakpoints=bps).value


def noise_correlation(t, T, p, spec=None):
    """K(t) = (1/pi) int J(w) coth(w/2T) cos(wt) dw.

    The zero-temperature part int J cos(wt) dw converges only
    conditionally; it is taken in closed form through exponential
    integrals, the thermal remainder J (coth - 1) cos(wt) by quadrature.
    K(0) diverges logarithmically for the Drude bath and returns inf.
    """
    t = abs(float(t))
    if t == 0.0:
        return math.inf if p.gamma > 0 else 0.0
    c = p.cutoff
    x = c * t
    zero_t = -0.5 * p.gamma * c * c * (math.exp(-x) * special.expi(x)
                                       - math.exp(x) * special.exp1(x))
    if T <= 0:
        return zero_t / math.pi

    def thermal(w):
        return spectral_density(w, p) * (coth_half(w / T) - 1.0) * np.cos(w * t)

    res = integrate_semi_infinite(thermal, spec, scale=max(p.cutoff, 4.0 * T),
                                  breakpoints=[T, 10 * T],
                                  context={"t": t, "T": T})
    return (zero_t + res.value) / math.pi
