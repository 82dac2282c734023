"""Heat per bit of von Neumann entropy under quasi-static changes of w0."""
import math
from dataclasses import dataclass
from typing import Optional

from .fluctuations import moments
from .gaussian_state import entropy_from_purity
from .thermo import entropy

LN2 = math.log(2.0)


class DegenerateVariationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class LandauerPoint:
    T: float
    ratio: float
    bound: float
    below_bound: bool
    error: Optional[str] = None

    @property
    def ratio_over_bound(self):
        return self.ratio / self.bound

    def ratio_in(self, omega0):
        """Ratio in units of hbar*omega0 per bit."""
        return self.ratio / omega0


def _vn_entropy(T, p, spec):
    mom = moments(T, p, spec)
    return entropy_from_purity(0.5 / math.sqrt(mom.q2 * mom.p2))


def landauer_ratio(T, p, delta=1e-3, spec=None):
    """|T dS / (dS_v / ln 2)| for w0 -> w0 (1 +- delta) at fixed bath and T.

    dS comes from the thermodynamic entropy integral, dS_v from the purity
    closed form fed with quadrature variances.
    """
    if not T > 0:
        raise ValueError("landauer_ratio needs T > 0")
    w_plus = p.replace(omega0=p.omega0 * (1.0 + delta))
    w_minus = p.replace(omega0=p.omega0 * (1.0 - delta))
    dS = 0.5 * (entropy(T, w_plus, spec) - entropy(T, w_minus, spec))
    dSv = 0.5 * (_vn_entropy(T, w_plus, spec) - _vn_entropy(T, w_minus, spec))
    if abs(dSv) < 1e-14:
        raise DegenerateVariationError(
            f"von Neumann entropy does not change (dS_v={dSv:.3g}) at T={T}")
    ratio = abs(T * dS / (dSv / LN2))
    bound = T * LN2
    return LandauerPoint(T, ratio, bound, ratio < bound)


def landauer_sweep(T_grid, p, delta=1e-3, spec=None):
    """Pointwise ratios; a failing point yields a NaN row carrying the error."""
    temps = list(T_grid)
    if any(b < a for a, b in zip(temps, temps[1:])):
        raise ValueError("temperature grid must be sorted ascending")
    out = []
    for T in temps:
        try:
            out.append(landauer_ratio(T, p, delta, spec))
        except (ArithmeticError, ValueError) as exc:
            out.append(LandauerPoint(T, math.nan, T * LN2, False, error=str(exc)))
    return out
