"""Vectorised numpy hypothesis enumeration (reference and fallback path).

All hypotheses of a window are scored at once. Hypothesis ``h`` carries
local coded bit ``b`` as ``(h >> b) & 1``; symbol ``(k, j)`` uses bits
``2(k n_tx + j)`` and ``2(k n_tx + j) + 1``.
"""

import numpy as np

from ..modem import QPSK
from ..numerics import log_bessel_i0

COHERENT, SIMO, RBF, LOS = 0, 1, 2, 3


def hypothesis_symbols(n_d: int, n_tx: int) -> np.ndarray:
    """Every data completion of a window, shape ``(2^(2 n_tx n_d), n_d, n_tx)``."""
    nb = 2 * n_tx * n_d
    h = np.arange(1 << nb)[:, None]
    q = np.arange(n_tx * n_d)
    sym = QPSK[2 * ((h >> (2 * q)) & 1) + ((h >> (2 * q + 1)) & 1)]
    return sym.reshape(-1, n_d, n_tx)


def _bessel_term(z, maxlog):
    return z if maxlog else log_bessel_i0(z)


def metric_table(y_data, p, cp, hk, family, n0, alpha, gain, maxlog):
    """Per-hypothesis log-metrics, shape ``(W, H)``."""
    n_w, n_d, n_rx = y_data.shape
    n_tx = p.shape[1]
    s = hypothesis_symbols(n_d, n_tx)
    if family == COHERENT:
        yh = np.einsum("hkj,wji->whki", s, hk)
        return np.sum(2.0 * (yh.conj() * y_data[:, None]).real - np.abs(yh) ** 2, axis=(2, 3)) / n0
    g = p[:, None] + np.einsum("hkj,wki->whji", s.conj(), y_data)
    gram = cp[:, None] + np.einsum("hkj,hkl->hjl", s.conj(), s)[None]
    energy = np.real(np.diagonal(gram, axis1=2, axis2=3))
    if family == SIMO:
        xn = energy[..., 0]
        lx = n0 + gain * (1.0 - alpha) * xn
        bx = gain * (1.0 - alpha) / (n0 * lx)
        a = np.abs(g[:, :, 0, :])
        z = 2.0 * np.sqrt(alpha) * a / lx[..., None]
        return (
            -n_rx * (np.log(lx) + alpha * xn / lx)
            + np.sum(bx[..., None] * a**2 + _bessel_term(z, maxlog), axis=-1)
        )
    if family == RBF:
        m = n0 * np.eye(n_tx) + gram
        _, logdet = np.linalg.slogdet(m)
        quad = np.real(np.sum(g.conj() * np.linalg.solve(m, g), axis=(-2, -1)))
        return -n_rx * logdet + quad / n0
    z = 2.0 * np.abs(g) / n0
    return np.sum(_bessel_term(z, maxlog), axis=(-2, -1)) - n_rx * np.sum(energy, axis=-1) / n0


def _class_view(table, b):
    n_w, n_h = table.shape
    return table.reshape(n_w, n_h >> (b + 1), 2, 1 << b)


def llrs_from_table(table, maxlog):
    """Per-bit LLRs from a ``(W, H)`` metric table (max or log-sum-exp per class)."""
    n_w, n_h = table.shape
    nb = n_h.bit_length() - 1
    out = np.empty((n_w, nb))
    for b in range(nb):
        v = _class_view(table, b)
        if maxlog:
            agg = v.max(axis=(1, 3))
        else:
            top = v.max(axis=(1, 3), keepdims=True)
            agg = np.log(np.sum(np.exp(v - top), axis=(1, 3))) + top[:, 0, :, 0]
        out[:, b] = agg[:, 0] - agg[:, 1]
    return out


def window_llrs(y_data, p, cp, hk, family, n0, alpha, gain, maxlog):
    """Same contract as the compiled kernel."""
    return llrs_from_table(metric_table(y_data, p, cp, hk, family, n0, alpha, gain, maxlog), maxlog)
