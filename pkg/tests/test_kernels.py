"""Compiled and pure-numpy kernels must agree."""
import numpy as np
import pytest

from qbm import _accel, kernels

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def test_backend_flag():
    assert _accel.backend() in ("numba", "numpy")


@needs_numba
def test_hermite_kernels_agree():
    u = np.linspace(-20, 20, 401)
    a = kernels.hermite_functions_numba(60, u)
    b = kernels.hermite_functions_numpy(60, u)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


@needs_numba
def test_legendre_kernels_agree():
    for d, w in ((0.3, 0.05), (0.2, -0.1), (0.0, -0.3)):
        a = kernels.legendre_homogeneous_numba(80, d, w)
        b = kernels.legendre_homogeneous_numpy(80, d, w)
        assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


def _arrow(n, seed=0):
    rng = np.random.default_rng(seed)
    d = np.sort(rng.uniform(0.1, 100.0, n)) ** 2
    b2 = rng.uniform(0.0, 2.0, n) ** 2
    alpha = 1.0 + np.sum(b2 / d)
    return alpha, d, b2


def _dense(alpha, d, b2):
    k = np.diag(np.concatenate(([alpha], d)))
    k[0, 1:] = k[1:, 0] = -np.sqrt(b2)
    lam, vec = np.linalg.eigh(k)
    return lam, vec[0] ** 2


@pytest.mark.parametrize("impl", ["numpy", "numba"])
def test_arrowhead_matches_eigh(impl):
    if impl == "numba" and not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    alpha, d, b2 = _arrow(300)
    fn = getattr(kernels, f"arrowhead_eigen_{impl}")
    lam, w = fn(alpha, d, b2)
    ref_lam, ref_w = _dense(alpha, d, b2)
    assert np.allclose(lam, ref_lam, rtol=1e-11, atol=1e-11)
    assert np.allclose(w, ref_w, atol=1e-12)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)


@needs_numba
def test_matsubara_kernels_agree():
    a = kernels.matsubara_partial_sum_numba(2 * np.pi * 0.3, 5000, 1.0, 2.0, 10.0)
    b = kernels.matsubara_partial_sum_numpy(2 * np.pi * 0.3, 5000, 1.0, 2.0, 10.0)
    assert a == pytest.approx(b, rel=1e-13)
