"""JIT selection.

Set ``CNDP_NUMBA=0`` to run every kernel as plain numpy/Python. The flag is
read once at import time.
"""
import os

_flag = os.environ.get("CNDP_NUMBA", "1").strip().lower()
USE_NUMBA = _flag not in ("0", "false", "no", "off")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None
    USE_NUMBA = False


def jit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


def backend():
    return "numba" if USE_NUMBA else "numpy"
