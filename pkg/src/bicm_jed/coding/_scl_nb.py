"""Compiled successive-cancellation list kernel (LLR-domain, exact f)."""

import numpy as np
from numba import njit

from .._nbmath import boxplus, softplus


@njit(cache=True)
def _ctz(i):
    t = 0
    while (i & 1) == 0:
        i >>= 1
        t += 1
    return t


@njit(cache=True)
def scl_paths(llr, frozen, list_size):
    n_code = llr.size
    n = 0
    while (1 << n) < n_code:
        n += 1
    off = np.zeros(n + 2, np.int64)
    for d in range(n + 1):
        off[d + 1] = off[d] + (n_code >> d)
    total = off[n + 1]

    alpha = np.zeros((list_size, total))
    beta = np.zeros((list_size, total), np.uint8)
    u = np.zeros((list_size, n_code), np.uint8)
    pm = np.zeros(list_size)
    alpha[0, :n_code] = llr
    nl = 1

    cur = np.zeros(total, np.uint8)
    cand_pm = np.empty(2 * list_size)
    parent = np.empty(2 * list_size, np.int64)
    bits = np.empty(2 * list_size, np.uint8)

    for i in range(n_code):
        dstart = 0 if i == 0 else n - 1 - _ctz(i)
        for l in range(nl):
            for d in range(dstart, n):
                h = n_code >> (d + 1)
                src = off[d]
                dst = off[d + 1]
                if (i >> (n - 1 - d)) & 1:
                    for j in range(h):
                        a = alpha[l, src + j]
                        b = alpha[l, src + h + j]
                        alpha[l, dst + j] = b + a if beta[l, dst + j] == 0 else b - a
                else:
                    for j in range(h):
                        alpha[l, dst + j] = boxplus(alpha[l, src + j], alpha[l, src + h + j])

        if frozen[i]:
            for l in range(nl):
                lam = alpha[l, off[n]]
                pm[l] += softplus(-lam)
                u[l, i] = 0
        else:
            for l in range(nl):
                lam = alpha[l, off[n]]
                cand_pm[2 * l] = pm[l] + softplus(-lam)
                cand_pm[2 * l + 1] = pm[l] + softplus(lam)
                parent[2 * l] = l
                parent[2 * l + 1] = l
                bits[2 * l] = 0
                bits[2 * l + 1] = 1
            n_cand = 2 * nl
            if n_cand <= list_size:
                keep = np.arange(n_cand)
            else:
                keep = np.argsort(cand_pm[:n_cand], kind="mergesort")[:list_size]
            new_nl = keep.size
            src_rows = np.empty(new_nl, np.int64)
            for r in range(new_nl):
                src_rows[r] = parent[keep[r]]
            alpha_new = alpha[src_rows]
            beta_new = beta[src_rows]
            u_new = u[src_rows]
            for r in range(new_nl):
                c = keep[r]
                pm[r] = cand_pm[c]
                u_new[r, i] = bits[c]
            alpha[:new_nl] = alpha_new
            beta[:new_nl] = beta_new
            u[:new_nl] = u_new
            nl = new_nl

        # propagate the decided bit up as partial sums
        for l in range(nl):
            cur[off[n]] = u[l, i]
            idx = i
            d = n
            while d > 0:
                size = n_code >> d
                if (idx & 1) == 0:
                    for j in range(size):
                        beta[l, off[d] + j] = cur[off[d] + j]
                    break
                for j in range(size):
                    left = beta[l, off[d] + j]
                    right = cur[off[d] + j]
                    cur[off[d - 1] + j] = left ^ right
                    cur[off[d - 1] + size + j] = right
                idx >>= 1
                d -= 1

    return u[:nl].copy(), pm[:nl].copy()
