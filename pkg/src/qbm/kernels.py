"""Hot inner loops, each with a compiled and a numpy implementation.

The public names (``hermite_functions``, ``legendre_homogeneous``,
``arrowhead_eigen``, ``matsubara_partial_sum``) point at the numba
versions unless ``QBM_DISABLE_NUMBA`` is set. Both variants are importable
under ``*_numba`` / ``*_numpy`` so tests and the benchmark can pit them
against each other.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

PI_QUARTER = np.pi ** -0.25


# --- normalized Hermite functions -----------------------------------------

def hermite_functions_numpy(n_max, u):
    """Rows ``psi_0(u) .. psi_{n_max}(u)`` via the normalized recurrence."""
    u = np.asarray(u, dtype=np.float64)
    out = np.empty((n_max + 1,) + u.shape)
    out[0] = PI_QUARTER * np.exp(-0.5 * u * u)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * u * out[0]
    for n in range(1, n_max):
        out[n + 1] = (np.sqrt(2.0 / (n + 1)) * u * out[n]
                      - np.sqrt(n / (n + 1.0)) * out[n - 1])
    return out


@njit
def _hermite_functions_flat(n_max, u):
    m = u.shape[0]
    out = np.empty((n_max + 1, m))
    for j in range(m):
        out[0, j] = PI_QUARTER * np.exp(-0.5 * u[j] * u[j])
    if n_max >= 1:
        s2 = np.sqrt(2.0)
        for j in range(m):
            out[1, j] = s2 * u[j] * out[0, j]
    # row-major sweep keeps the writes contiguous
    for n in range(1, n_max):
        a = np.sqrt(2.0 / (n + 1))
        b = np.sqrt(n / (n + 1.0))
        for j in range(m):
            out[n + 1, j] = a * u[j] * out[n, j] - b * out[n - 1, j]
    return out


def hermite_functions_numba(n_max, u):
    u = np.asarray(u, dtype=np.float64)
    flat = _hermite_functions_flat(int(n_max), np.ascontiguousarray(u.ravel()))
    return flat.reshape((n_max + 1,) + u.shape)


# --- homogeneous Legendre recurrence --------------------------------------
# Q_n = w^{n/2} P_n(d / sqrt(w)) obeys
#   (n+1) Q_{n+1} = (2n+1) d Q_n - n w Q_{n-1},
# which stays real for either sign of w.

def legendre_homogeneous_numpy(n_max, d, w):
    q = np.empty(n_max + 1)
    q[0] = 1.0
    if n_max >= 1:
        q[1] = d
    for n in range(1, n_max):
        q[n + 1] = ((2 * n + 1) * d * q[n] - n * w * q[n - 1]) / (n + 1)
    return q


@njit
def legendre_homogeneous_numba(n_max, d, w):
    q = np.empty(n_max + 1)
    q[0] = 1.0
    if n_max >= 1:
        q[1] = d
    for n in range(1, n_max):
        q[n + 1] = ((2 * n + 1) * d * q[n] - n * w * q[n - 1]) / (n + 1)
    return q


# --- arrowhead eigenproblem -----------------------------------------------
# Matrix [[alpha, b^T], [b, diag(d)]] with d strictly increasing and b != 0.
# Eigenvalues are the N+1 zeros of
#   f(lam) = alpha - lam - sum_j b_j^2 / (d_j - lam),
# one below d_0, one in each gap, one above d_{N-1}. Each zero is found as an
# offset tau from its nearer pole so that d_j - lam keeps full precision.

_MAXIT = 200


@njit
def _secular(tau, shift, delta, b2):
    # returns f and -f' at lam = origin + tau, with shift = alpha - origin
    f = shift - tau
    fp = 1.0
    for j in range(delta.shape[0]):
        r = 1.0 / (delta[j] - tau)
        t = b2[j] * r
        f -= t
        fp += t * r
    return f, fp


@njit
def _arrowhead_root(k, alpha, d, b2, upper):
    n = d.shape[0]
    lo = 0.0 if k == 0 else d[k - 1]
    hi = upper if k == n else d[k]
    # origin at the bracket end nearer to the zero; for k = 0 that may be 0
    if k == n:
        origin = d[n - 1]
    else:
        mid = 0.5 * (lo + hi)
        fm = alpha - mid
        for j in range(n):
            fm -= b2[j] / (d[j] - mid)
        origin = hi if fm > 0.0 else lo
    delta = d - origin
    shift = alpha - origin
    a = lo - origin
    c = hi - origin
    tau = 0.5 * (a + c)
    for _ in range(_MAXIT):
        f, fp = _secular(tau, shift, delta, b2)
        if f > 0.0:
            a = tau
        else:
            c = tau
        step = f / fp
        nxt = tau + step
        if not (a < nxt < c):
            nxt = 0.5 * (a + c)
        if abs(nxt - tau) <= 4e-16 * abs(nxt) or nxt == tau:
            tau = nxt
            break
        tau = nxt
        if c - a <= 4e-16 * max(abs(a), abs(c)):
            break
    _, fp = _secular(tau, shift, delta, b2)
    # fp = 1 + sum b^2/(d-lam)^2 -> squared system component of the eigenvector
    return origin + tau, 1.0 / fp


@njit
def arrowhead_eigen_numba(alpha, d, b2):
    n = d.shape[0]
    s = 0.0
    for j in range(n):
        s += np.sqrt(b2[j])
    upper = max(alpha, d[n - 1]) + s + 1.0
    lam = np.empty(n + 1)
    w = np.empty(n + 1)
    for k in range(n + 1):
        lam[k], w[k] = _arrowhead_root(k, alpha, d, b2, upper)
    return lam, w


def arrowhead_eigen_numpy(alpha, d, b2, block=256):
    """Vectorized safeguarded Newton over blocks of roots."""
    d = np.asarray(d, dtype=np.float64)
    b2 = np.asarray(b2, dtype=np.float64)
    n = d.size
    upper = max(alpha, d[-1]) + np.sqrt(b2).sum() + 1.0
    lows = np.concatenate(([0.0], d))
    highs = np.concatenate((d, [upper]))
    mids = 0.5 * (lows + highs)
    fm = alpha - mids - (b2[None, :] / (d[None, :] - mids[:, None])).sum(axis=1)
    origin = np.where(fm > 0.0, highs, lows)
    origin[-1] = d[-1]
    lam = np.empty(n + 1)
    wgt = np.empty(n + 1)
    for s in range(0, n + 1, block):
        sl = slice(s, min(s + block, n + 1))
        org = origin[sl]
        delta = d[None, :] - org[:, None]
        shift = alpha - org
        a = lows[sl] - org
        c = highs[sl] - org
        tau = 0.5 * (a + c)
        active = np.ones(tau.size, dtype=bool)
        for _ in range(_MAXIT):
            r = 1.0 / (delta - tau[:, None])
            t = b2[None, :] * r
            f = shift - tau - t.sum(axis=1)
            fp = 1.0 + (t * r).sum(axis=1)
            a = np.where(active & (f > 0.0), tau, a)
            c = np.where(active & (f <= 0.0), tau, c)
            nxt = tau + f / fp
            bad = ~((a < nxt) & (nxt < c))
            nxt = np.where(bad, 0.5 * (a + c), nxt)
            done = (np.abs(nxt - tau) <= 4e-16 * np.abs(nxt)) | (nxt == tau) | (
                c - a <= 4e-16 * np.maximum(np.abs(a), np.abs(c)))
            tau = np.where(active, nxt, tau)
            active &= ~done
            if not active.any():
                break
        r = 1.0 / (delta - tau[:, None])
        fp = 1.0 + (b2[None, :] * r * r).sum(axis=1)
        lam[sl] = org + tau
        wgt[sl] = 1.0 / fp
    return lam, wgt


# --- Matsubara sums -------------------------------------------------------

def matsubara_partial_sum_numpy(nu, n_terms, w0sq, coupling, cutoff):
    """sum_{n=1}^{N} 1 / (w0^2 + v_n^2 + v_n * coupling*cutoff / (v_n + cutoff))."""
    v = nu * np.arange(1, n_terms + 1, dtype=np.float64)
    den = w0sq + v * v + v * coupling * cutoff / (v + cutoff)
    # smallest terms first
    return np.sum((1.0 / den)[::-1])


@njit
def matsubara_partial_sum_numba(nu, n_terms, w0sq, coupling, cutoff):
    acc = 0.0
    for n in range(n_terms, 0, -1):
        v = nu * n
        acc += 1.0 / (w0sq + v * v + v * coupling * cutoff / (v + cutoff))
    return acc


if USE_NUMBA:
    hermite_functions = hermite_functions_numba
    legendre_homogeneous = legendre_homogeneous_numba
    arrowhead_eigen = arrowhead_eigen_numba
    matsubara_partial_sum = matsubara_partial_sum_numba
else:
    hermite_functions = hermite_functions_numpy
    legendre_homogeneous = legendre_homogeneous_numpy
    arrowhead_eigen = arrowhead_eigen_numpy
    matsubara_partial_sum = matsubara_partial_sum_numpy
