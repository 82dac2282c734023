"""Numba dispatch.

Kernels in :mod:`qbm.kernels` come in pairs: a ``@njit`` version and a plain
numpy version. The compiled one is used unless numba is missing or the
environment variable ``QBM_DISABLE_NUMBA`` is set to a truthy value before
import.
"""
import logging
import os

logger = logging.getLogger(__name__)

_FLAG = os.environ.get("QBM_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba

    logging.getLogger("numba").setLevel(logging.WARNING)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator.

    Always compiles when numba is importable, so the benchmark can compare
    both paths within one process regardless of ``QBM_DISABLE_NUMBA``.
    """
    kwargs.setdefault("cache", True)
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def backend():
    return "numba" if USE_NUMBA else "numpy"
