"""Scalar helpers shared by the numba kernels (same algorithms as numerics)."""

import math

from numba import njit

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@njit(cache=True, inline="always")
def log_i0(z):
    if z < 20.0:
        q = 0.25 * z * z
        term = 1.0
        total = 1.0
        k = 0
        while True:
            k += 1
            term *= q / (k * k)
            total += term
            if term <= 1e-17 * total or k > 200:
                break
        return math.log(total)
    term = 1.0
    total = 1.0
    for k in range(1, 40):
        term *= (2 * k - 1) * (2 * k - 1) / (8.0 * k * z)
        total += term
        if term <= 1e-17 * total:
            break
    return z - 0.5 * math.log(z) - _HALF_LOG_2PI + math.log(total)


@njit(cache=True, inline="always")
def softplus(x):
    """log(1 + e^x) without overflow."""
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


@njit(cache=True, inline="always")
def boxplus(a, b):
    """Exact check-node combination 2 atanh(tanh(a/2) tanh(b/2))."""
    s = 1.0
    if a < 0.0:
        s = -s
    if b < 0.0:
        s = -s
    m = min(abs(a), abs(b))
    return s * m + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))
