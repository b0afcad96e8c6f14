"""Kernel backend selection.

The hot loops (hypothesis enumeration, list decoding, belief propagation)
exist twice: an ``@njit`` version and a vectorised numpy version. The numba
path is used when numba imports and ``BICM_JED_DISABLE_NUMBA`` is unset or
``0``. Both paths produce the same numbers up to floating-point summation
order; ``tests/test_backends.py`` holds them together.
"""

import os

_FLAG = os.environ.get("BICM_JED_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
