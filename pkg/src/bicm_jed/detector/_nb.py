"""Compiled hypothesis enumeration over detection windows.

Hypotheses are walked in reflected Gray order, so exactly one QPSK symbol
changes per step and the inner products ``x^H y`` (and, for two transmit
antennas, the Gram cross term) are updated in O(n_rx).
"""

import math

import numpy as np
from numba import njit

from .._nbmath import log_i0

COHERENT, SIMO, RBF, LOS = 0, 1, 2, 3

_R2 = 1.0 / math.sqrt(2.0)


@njit(cache=True, inline="always")
def _qpsk(b0, b1):
    return complex((1.0 - 2.0 * b0) * _R2, (1.0 - 2.0 * b1) * _R2)


@njit(cache=True, inline="always")
def _ctz(t):
    c = 0
    while (t & 1) == 0:
        t >>= 1
        c += 1
    return c


@njit(cache=True)
def _coherent_re(y, hk, sym, k, n0):
    n_tx, n_rx = hk.shape
    acc = 0.0
    for i in range(n_rx):
        yh = 0j
        for j in range(n_tx):
            yh += sym[k, j] * hk[j, i]
        acc += 2.0 * (yh.real * y[k, i].real + yh.imag * y[k, i].imag) - (yh.real * yh.real + yh.imag * yh.imag)
    return acc / n0


@njit(cache=True)
def _window_llr(y, p, cp, hk, family, n0, alpha, gain, maxlog, out):
    n_d, n_rx = y.shape
    n_tx = p.shape[0]
    nb = 2 * n_tx * n_d
    n_hyp = 1 << nb
    metrics = np.empty(n_hyp)
    mx0 = np.full(nb, -np.inf)
    mx1 = np.full(nb, -np.inf)

    sym = np.empty((n_d, n_tx), np.complex128)
    for k in range(n_d):
        for j in range(n_tx):
            sym[k, j] = _qpsk(0.0, 0.0)
    g = p.copy()
    for k in range(n_d):
        for j in range(n_tx):
            s = sym[k, j].conjugate()
            for i in range(n_rx):
                g[j, i] += s * y[k, i]
    energy = np.empty(n_tx)
    for j in range(n_tx):
        energy[j] = cp[j, j].real + n_d
    cross = 0j
    if n_tx == 2:
        cross = cp[0, 1]
        for k in range(n_d):
            cross += sym[k, 0].conjugate() * sym[k, 1]
    re_terms = np.zeros(n_d)
    if family == COHERENT:
        for k in range(n_d):
            re_terms[k] = _coherent_re(y, hk, sym, k, n0)

    sqa = math.sqrt(alpha)
    code = 0
    for t in range(n_hyp):
        if t > 0:
            b = _ctz(t)
            code ^= 1 << b
            q = b >> 1
            k = q // n_tx
            j = q - k * n_tx
            new = _qpsk(float((code >> (2 * q)) & 1), float((code >> (2 * q + 1)) & 1))
            ds = new - sym[k, j]
            if family == COHERENT:
                sym[k, j] = new
                re_terms[k] = _coherent_re(y, hk, sym, k, n0)
            else:
                dsc = ds.conjugate()
                for i in range(n_rx):
                    g[j, i] += dsc * y[k, i]
                if n_tx == 2:
                    if j == 0:
                        cross += dsc * sym[k, 1]
                    else:
                        cross += sym[k, 0].conjugate() * ds
                sym[k, j] = new

        if family == COHERENT:
            m = 0.0
            for k in range(n_d):
                m += re_terms[k]
        elif family == SIMO:
            xn = energy[0]
            lx = n0 + gain * (1.0 - alpha) * xn
            bx = gain * (1.0 - alpha) / (n0 * lx)
            m = -n_rx * (math.log(lx) + alpha * xn / lx)
            for i in range(n_rx):
                a2 = g[0, i].real * g[0, i].real + g[0, i].imag * g[0, i].imag
                z = 2.0 * sqa * math.sqrt(a2) / lx
                m += bx * a2 + (z if maxlog else log_i0(z))
        elif family == RBF:
            if n_tx == 1:
                d = n0 + energy[0]
                m = -n_rx * math.log(d)
                for i in range(n_rx):
                    m += (g[0, i].real ** 2 + g[0, i].imag ** 2) / (d * n0)
            else:
                m00 = n0 + energy[0]
                m11 = n0 + energy[1]
                det = m00 * m11 - (cross.real * cross.real + cross.imag * cross.imag)
                quad = 0.0
                for i in range(n_rx):
                    g0 = g[0, i]
                    g1 = g[1, i]
                    quad += (
                        m11 * (g0.real * g0.real + g0.imag * g0.imag)
                        + m00 * (g1.real * g1.real + g1.imag * g1.imag)
                        - 2.0 * (g0.conjugate() * cross * g1).real
                    )
                m = -n_rx * math.log(det) + quad / (det * n0)
        else:
            m = 0.0
            for j in range(n_tx):
                m -= n_rx * energy[j] / n0
                for i in range(n_rx):
                    gj = g[j, i]
                    z = 2.0 * math.sqrt(gj.real * gj.real + gj.imag * gj.imag) / n0
                    m += z if maxlog else log_i0(z)

        metrics[code] = m
        for b in range(nb):
            if (code >> b) & 1:
                if m > mx1[b]:
                    mx1[b] = m
            elif m > mx0[b]:
                mx0[b] = m

    if maxlog:
        for b in range(nb):
            out[b] = mx0[b] - mx1[b]
        return

    mx = np.empty((2, nb))
    mx[0] = mx0
    mx[1] = mx1
    top = max(mx0[0], mx1[0])
    acc = np.zeros((2, nb))
    for h in range(n_hyp):
        w = math.exp(metrics[h] - top)
        for b in range(nb):
            acc[(h >> b) & 1, b] += w
    for b in range(nb):
        if acc[0, b] > 0.0 and acc[1, b] > 0.0:
            out[b] = math.log(acc[0, b]) - math.log(acc[1, b])
        else:
            # one class underflowed against the global maximum: redo both
            # with their own maxima as the shift
            c = np.zeros(2)
            for h in range(n_hyp):
                k = (h >> b) & 1
                c[k] += math.exp(metrics[h] - mx[k, b])
            out[b] = (mx[0, b] + math.log(c[0])) - (mx[1, b] + math.log(c[1]))


@njit(cache=True, nogil=True)
def window_llrs(y_data, p, cp, hk, family, n0, alpha, gain, maxlog):
    """LLRs for a stack of windows; ``y_data`` is ``(W, Nd, n_rx)``."""
    n_w, n_d, _ = y_data.shape
    n_tx = p.shape[1]
    out = np.empty((n_w, 2 * n_tx * n_d))
    for w in range(n_w):
        _window_llr(y_data[w], p[w], cp[w], hk[w], family, n0, alpha, gain, maxlog, out[w])
    return out
