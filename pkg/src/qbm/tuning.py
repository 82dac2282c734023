"""Root-find the coupling that hits a target energy or occupation."""
from scipy.optimize import brentq

from .fluctuations import moments


def _solve(fn, lo, hi, xtol):
    f_lo, f_hi = fn(lo), fn(hi)
    while f_lo * f_hi > 0 and hi < 1e3:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        f_hi = fn(hi)
    if f_lo * f_hi > 0:
        raise ValueError("target not bracketed by any coupling in range")
    return brentq(fn, lo, hi, xtol=xtol)


def gamma_for_energy(target, p, T=0.0, xtol=1e-12, spec=None):
    """gamma such that <H_s> at temperature T equals ``target``."""
    return _solve(lambda g: moments(T, p.replace(gamma=g), spec).mean_energy - target,
                  1e-8, 1.0, xtol)


def gamma_for_occupation(target, p, T=0.0, xtol=1e-12, spec=None):
    """gamma such that (x + y)/4 - 1/2 = ``target`` in the bare number basis."""
    def excess(g):
        q = p.replace(gamma=g)
        return moments(T, q, spec).mean_energy / q.omega0 - 0.5 - target

    return _solve(excess, 1e-8, 1.0, xtol)
