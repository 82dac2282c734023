"""Quadrature engine and special functions shared by the physics modules."""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from . import kernels


class QuadratureError(ArithmeticError):
    """Adaptive quadrature ran out of subdivisions.

    Carries the last estimate and its error bound so callers can decide
    whether a degraded answer is usable.
    """

    def __init__(self, message, value=math.nan, error=math.inf, context=None):
        super().__init__(message)
        self.value = value
        self.error = error
        self.context = dict(context or {})

    def __str__(self):
        base = super().__str__()
        extra = f" (estimate={self.value:.6g}, error={self.error:.3g})"
        if self.context:
            extra += " " + ", ".join(f"{k}={v!r}" for k, v in self.context.items())
        return base + extra


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 4000
    # f(w) ~ w^-p at large w; selects the tail map w = split * u^(-1/(p-1))
    tail_decay_exponent: float = 2.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def replace(self, **changes):
        fields = dict(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                      max_subdivisions=self.max_subdivisions,
                      tail_decay_exponent=self.tail_decay_exponent)
        fields.update(changes)
        return QuadratureSpec(**fields)


DEFAULT_SPEC = QuadratureSpec()


def default_spec():
    """Default spec, honouring the ``QBM_QUAD_RTOL`` override."""
    import os

    rtol = os.environ.get("QBM_QUAD_RTOL")
    if rtol:
        return DEFAULT_SPEC.replace(rel_tol=float(rtol))
    return DEFAULT_SPEC


class QuadResult(NamedTuple):
    value: float
    error: float


_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)


def _gauss(g, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _GL_X[None, :]
    return half * (g(x) @ _GL_W)


def _adaptive(g, edges, spec, context=None):
    """Globally adaptive Gauss-Legendre on ``g`` over consecutive ``edges``.

    Each interval is compared with the sum over its two halves; the halves
    are kept as the estimate, the difference as the error bound. Every round
    splits the intervals carrying the largest errors, vectorized; intervals
    left alone keep their estimate and error unchanged.
    """
    edges = np.asarray(edges, dtype=np.float64)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    mid = 0.5 * (lo + hi)
    whole = _gauss(g, lo, hi)
    left, right = _gauss(g, lo, mid), _gauss(g, mid, hi)
    err = np.abs(left + right - whole)
    splits = 0
    done_val = 0.0
    done_err = 0.0
    while True:
        pair = left + right
        total = done_val + pair.sum()
        errsum = done_err + err.sum()
        if not np.isfinite(total):
            raise QuadratureError("non-finite integrand", total, math.inf, context)
        roundoff = 50 * np.finfo(float).eps * (abs(done_val) + np.abs(pair).sum())
        tol = max(spec.abs_tol, spec.rel_tol * abs(total), roundoff)
        if errsum <= tol:
            return QuadResult(float(total), float(errsum))
        if splits >= spec.max_subdivisions:
            raise QuadratureError("quadrature did not converge", float(total),
                                  float(errsum), context)
        # retire intervals whose error is already negligible
        keep = err > 1e-3 * tol / max(len(err), 1)
        done_val += pair[~keep].sum()
        done_err += err[~keep].sum()
        lo, hi, mid, left, right, err = (a[keep] for a in (lo, hi, mid, left, right, err))
        sel = err >= 0.05 * err.max()
        budget = spec.max_subdivisions - splits
        if sel.sum() > budget:
            idx = np.argsort(err)[::-1][:budget]
            sel = np.zeros_like(sel)
            sel[idx] = True
        splits += int(sel.sum())
        # children of the split intervals; their parents' halves are the new wholes
        c_lo = np.concatenate((lo[sel], mid[sel]))
        c_hi = np.concatenate((mid[sel], hi[sel]))
        c_whole = np.concatenate((left[sel], right[sel]))
        c_mid = 0.5 * (c_lo + c_hi)
        c_left, c_right = _gauss(g, c_lo, c_mid), _gauss(g, c_mid, c_hi)
        c_err = np.abs(c_left + c_right - c_whole)
        lo = np.concatenate((lo[~sel], c_lo))
        hi = np.concatenate((hi[~sel], c_hi))
        mid = np.concatenate((mid[~sel], c_mid))
        left = np.concatenate((left[~sel], c_left))
        right = np.concatenate((right[~sel], c_right))
        err = np.concatenate((err[~sel], c_err))


def integrate_interval(f, a, b, spec=None, breakpoints=(), context=None):
    """Integral of vectorized ``f`` over the finite interval [a, b]."""
    spec = spec or default_spec()
    pts = sorted({float(a), float(b)} | {float(p) for p in breakpoints if a < p < b})
    return _adaptive(f, pts, spec, context)


def integrate_semi_infinite(f, spec=None, scale=1.0, breakpoints=(), context=None):
    """Integral of vectorized ``f`` over (0, inf).

    [0, split] is integrated directly with ``split = 10 * max(scale,
    breakpoints)``; (split, inf) is mapped onto (0, 1] by
    ``w = split * u**(-1/k)`` with ``k = max(1, p - 1)`` for tail decay
    exponent ``p``, which leaves a bounded integrand for ``f ~ w**-p``.
    """
    spec = spec or default_spec()
    bps = [float(p) for p in breakpoints if p > 0 and np.isfinite(p)]
    split = 10.0 * max([float(scale)] + bps)
    k = max(1.0, spec.tail_decay_exponent - 1.0)
    # s in [0, split] is w itself; s in [split, split + 1] is the tail with
    # u = split + 1 - s running from 1 down to 0
    def g(s):
        out = np.empty_like(s)
        head = s <= split
        if head.any():
            out[head] = f(s[head])
        tail = ~head
        if tail.any():
            u = split + 1.0 - s[tail]
            w = split * u ** (-1.0 / k)
            out[tail] = f(w) * (split / k) * u ** (-1.0 / k - 1.0)
        return out

    edges = sorted({0.0, split, split + 1.0} | {p for p in bps if p < split})
    return _adaptive(g, edges, spec, context)


# --- special functions ----------------------------------------------------

def log_gamma_complex(z):
    """Principal branch of log Gamma(z)."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise ValueError(f"log_gamma_complex: pole at z={z.real:g}")
    return complex(special.loggamma(z))


def cubic_roots(a2, a1, a0):
    """Roots of v^3 + a2 v^2 + a1 v + a0 with exactly conjugate complex pairs.

    Returned as ``(real root, r2, r3)``; for a complex pair r2 has the
    positive imaginary part and r3 == conj(r2). Three real roots come back
    ascending.
    """
    a2, a1, a0 = float(a2), float(a1), float(a0)
    # rescale v = s t so the coefficients are O(1); avoids under/overflow
    s = max(abs(a2), math.sqrt(abs(a1)), abs(a0) ** (1.0 / 3.0))
    if s == 0.0:
        return (0j, 0j, 0j)
    return tuple(s * r for r in _cubic_unit(a2 / s, a1 / s / s, a0 / s / s / s))


def _cubic_unit(a2, a1, a0):
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    shift = -a2 / 3.0

    def poly(x):
        return ((x + a2) * x + a1) * x + a0

    def polish(x):
        for _ in range(6):
            d = (3.0 * x + 2.0 * a2) * x + a1
            if d == 0:
                break
            step = poly(x) / d
            x = x - step
            if abs(step) <= 1e-16 * max(1.0, abs(x)):
                break
        return x

    # one well-conditioned real root first
    if disc > 0:
        sq = math.sqrt(disc)
        # avoid cancellation in -q/2 +- sq
        big = -q / 2.0 - math.copysign(sq, q)
        u = math.copysign(abs(big) ** (1.0 / 3.0), big)
        v = -p / (3.0 * u) if u != 0 else 0.0
        r = u + v + shift
    elif p == 0:
        r = shift
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = min(1.0, max(-1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        trig = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]
        r = max(trig, key=abs)
    r = polish(r)
    # deflate to v^2 + b v + c; c from the product rule when r is not tiny
    b = a2 + r
    c = -a0 / r if abs(r) > 1e-8 else a1 + r * b
    qd = b * b - 4.0 * c
    if qd < 0:
        z = complex(-b / 2.0, math.sqrt(-qd) / 2.0)
        # Newton polish on the complex root keeps the pair exact
        for _ in range(3):
            d = (3.0 * z + 2.0 * a2) * z + a1
            if d == 0:
                break
            z = z - (((z + a2) * z + a1) * z + a0) / d
        z = complex(z.real, abs(z.imag))
        return (complex(r), z, z.conjugate())
    big = -0.5 * (b + math.copysign(math.sqrt(qd), b))
    small = c / big if big != 0 else 0.0
    reals = sorted([r, polish(big), polish(small)])
    return tuple(complex(x) for x in reals)


def hermite_wavefunction(n, u):
    """Normalized oscillator eigenfunction (sqrt(pi) 2^n n!)^-1/2 H_n(u) e^{-u^2/2}."""
    if n < 0:
        raise ValueError("n must be non-negative")
    u_arr = np.asarray(u, dtype=np.float64)
    vals = kernels.hermite_functions(int(n), np.atleast_1d(u_arr))[n]
    return float(vals[0]) if u_arr.ndim == 0 else vals.reshape(u_arr.shape)


def legendre_p(n, z):
    """Legendre polynomial P_n at (possibly complex) z by upward recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    z = complex(z)
    p0, p1 = 1.0 + 0j, z
    if n == 0:
        return p0
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1) * z * p1 - k * p0) / (k + 1)
    return p1


def coth_half(x):
    """coth(x/2) for x > 0, series below 1e-4 and overflow-safe above."""
    x = np.asarray(x, dtype=np.float64)
    small = x < 1e-4
    xs = np.where(small, 1.0, x)
    e = np.exp(-xs)
    out = 1.0 + 2.0 * e / -np.expm1(-xs)
    return np.where(small, 2.0 / np.where(small, x, 1.0) + x / 6.0, out)


def resonance_ladder(center, width, lo=0.0, hi=math.inf, ratio=4.0):
    """Breakpoints center +- width * ratio**k that stay inside (lo, hi).

    Keeps every panel comparable in length to its distance from a
    Lorentzian peak, so no panel can hide the peak's flank between nodes.
    """
    pts = [center]
    step = width
    while True:
        left, right = center - step, center + step
        inside = False
        if left > lo:
            pts.append(left)
            inside = True
        if right < hi:
            pts.append(right)
            inside = True
        if not inside:
            break
        step *= ratio
    return sorted(pts)
