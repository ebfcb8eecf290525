"""Backend selection for the compiled kernels.

Set ``IA_TAILS_BACKEND=numpy`` to bypass numba and run the pure numpy
implementations. The default is ``numba`` whenever numba imports.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_requested = os.environ.get("IA_TAILS_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"IA_TAILS_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _requested == "numba"


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged.

    Compilation is lazy so importing the package stays cheap.
    """
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)


def backend():
    return "numba" if USE_NUMBA else "numpy"
