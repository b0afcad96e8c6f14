"""Compiled flooding sum-product decoder."""

import math

import numpy as np
from numba import njit

# tanh products are clipped here so that atanh stays finite
_T_MAX = 1.0 - 1e-15


@njit(cache=True)
def bp_flooding(llr, check_ptr, edge_var, max_iters):
    n = llr.size
    m = check_ptr.size - 1
    n_edges = edge_var.size
    v2c = np.empty(n_edges)
    c2v = np.zeros(n_edges)
    for e in range(n_edges):
        v2c[e] = llr[edge_var[e]]
    post = llr.copy()
    bits = np.zeros(n, np.uint8)
    t = np.empty(n_edges)
    pre = np.empty(n_edges + 1)
    for it in range(1, max_iters + 1):
        for c in range(m):
            lo = check_ptr[c]
            hi = check_ptr[c + 1]
            for e in range(lo, hi):
                t[e] = math.tanh(0.5 * v2c[e])
            acc = 1.0
            for e in range(lo, hi):
                pre[e] = acc
                acc *= t[e]
            acc = 1.0
            for e in range(hi - 1, lo - 1, -1):
                p = pre[e] * acc
                acc *= t[e]
                if p > _T_MAX:
                    p = _T_MAX
                elif p < -_T_MAX:
                    p = -_T_MAX
                c2v[e] = 2.0 * math.atanh(p)
        for j in range(n):
            post[j] = llr[j]
        for e in range(n_edges):
            post[edge_var[e]] += c2v[e]
        for e in range(n_edges):
            v2c[e] = post[edge_var[e]] - c2v[e]
        for j in range(n):
            bits[j] = 1 if post[j] < 0.0 else 0
        ok = True
        for c in range(m):
            s = 0
            for e in range(check_ptr[c], check_ptr[c + 1]):
                s ^= bits[edge_var[e]]
            if s:
                ok = False
                break
        if ok:
            return bits, True, it
    return bits, False, max_iters
