"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both versions are called in the same process; the first numba call (JIT or
cache load) is excluded from the timings and reported separately.
"""
import argparse
import time

import numpy as np

from qbm import kernels
from qbm.bath import BathParams
from qbm.discrete_bath import build


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    p = BathParams(gamma=1.0, cutoff=10.0)
    bath = build(4000, p)
    alpha = p.omega0 ** 2 + 2.0 * bath.counter_term / p.m
    d = bath.omegas ** 2
    b2 = bath.couplings ** 2 / (p.m * bath.masses)
    u = np.linspace(-12.0, 12.0, 20000)
    nu = 2 * np.pi * 0.01
    return {
        "arrowhead N=4000": (lambda: kernels.arrowhead_eigen_numba(alpha, d, b2),
                             lambda: kernels.arrowhead_eigen_numpy(alpha, d, b2)),
        "hermite n<=80, 2e4 pts": (lambda: kernels.hermite_functions_numba(80, u),
                                   lambda: kernels.hermite_functions_numpy(80, u)),
        "legendre n<=400": (lambda: kernels.legendre_homogeneous_numba(400, 0.7, 0.3),
                            lambda: kernels.legendre_homogeneous_numpy(400, 0.7, 0.3)),
        "matsubara 1e6 terms": (lambda: kernels.matsubara_partial_sum_numba(nu, 10 ** 6, 1.0, 1.0, 10.0),
                                lambda: kernels.matsubara_partial_sum_numpy(nu, 10 ** 6, 1.0, 1.0, 10.0)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':28s} {'first call':>11s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s} {'max diff':>9s}")
    for name, (fast, slow) in cases().items():
        t0 = time.perf_counter()
        fast()
        first = time.perf_counter() - t0
        t_fast, a = best_of(fast, args.repeat)
        t_slow, b = best_of(slow, args.repeat)
        a = a if isinstance(a, tuple) else (a,)
        b = b if isinstance(b, tuple) else (b,)
        diff = max(float(np.max(np.abs(np.asarray(x) - np.asarray(y)) / (1 + np.abs(np.asarray(y)))))
                   for x, y in zip(a, b))
        print(f"{name:28s} {first:10.3f}s {t_fast * 1e3:8.2f}ms {t_slow * 1e3:8.2f}ms "
              f"{t_slow / t_fast:7.1f}x {diff:9.1e}")


if __name__ == "__main__":
    main()
