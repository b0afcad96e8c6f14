"""Pure-numpy successive-cancellation list kernel, vectorised across paths."""

import numpy as np


def _boxplus(a, b):
    return (
        np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )


def _softplus(x):
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def _ctz(i: int) -> int:
    return (i & -i).bit_length() - 1


def scl_paths(llr, frozen, list_size):
    n_code = llr.size
    n = n_code.bit_length() - 1
    off = np.zeros(n + 2, np.int64)
    for d in range(n + 1):
        off[d + 1] = off[d] + (n_code >> d)
    total = int(off[n + 1])

    alpha = np.zeros((1, total))
    beta = np.zeros((1, total), np.uint8)
    u = np.zeros((1, n_code), np.uint8)
    pm = np.zeros(1)
    alpha[0, :n_code] = llr

    for i in range(n_code):
        dstart = 0 if i == 0 else n - 1 - _ctz(i)
        for d in range(dstart, n):
            h = n_code >> (d + 1)
            src, dst = off[d], off[d + 1]
            a = alpha[:, src : src + h]
            b = alpha[:, src + h : src + 2 * h]
            if (i >> (n - 1 - d)) & 1:
                sgn = 1.0 - 2.0 * beta[:, dst : dst + h]
                alpha[:, dst : dst + h] = b + sgn * a
            else:
                alpha[:, dst : dst + h] = _boxplus(a, b)

        lam = alpha[:, off[n]]
        if frozen[i]:
            pm = pm + _softplus(-lam)
            u[:, i] = 0
        else:
            nl = pm.size
            cand_pm = np.empty(2 * nl)
            cand_pm[0::2] = pm + _softplus(-lam)
            cand_pm[1::2] = pm + _softplus(lam)
            if 2 * nl <= list_size:
                keep = np.arange(2 * nl)
            else:
                keep = np.argsort(cand_pm, kind="stable")[:list_size]
            rows = keep // 2
            alpha = alpha[rows]
            beta = beta[rows]
            u = u[rows]
            u[:, i] = keep % 2
            pm = cand_pm[keep]

        cur = np.zeros((pm.size, total), np.uint8)
        cur[:, off[n]] = u[:, i]
        idx = i
        d = n
        while d > 0:
            size = n_code >> d
            o = off[d]
            if (idx & 1) == 0:
                beta[:, o : o + size] = cur[:, o : o + size]
                break
            left = beta[:, o : o + size]
            right = cur[:, o : o + size]
            p = off[d - 1]
            cur[:, p : p + size] = left ^ right
            cur[:, p + size : p + 2 * size] = right
            idx >>= 1
            d -= 1

    return u.copy(), pm.copy()
