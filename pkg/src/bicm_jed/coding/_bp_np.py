"""Pure-numpy flooding sum-product decoder on a padded check layout."""

import numpy as np

_T_MAX = 1.0 - 1e-15


def bp_flooding(llr, check_ptr, edge_var, max_iters):
    n = llr.size
    m = check_ptr.size - 1
    deg = np.diff(check_ptr)
    dmax = int(deg.max())
    # slot (c, k) of the padded table holds edge check_ptr[c] + k
    slot_c = np.repeat(np.arange(m), deg)
    slot_k = np.arange(edge_var.size) - check_ptr[slot_c]
    v2c = llr[edge_var].copy()
    c2v = np.zeros_like(v2c)
    bits = np.zeros(n, np.uint8)
    for it in range(1, max_iters + 1):
        t = np.ones((m, dmax))
        t[slot_c, slot_k] = np.tanh(0.5 * v2c)
        pre = np.ones((m, dmax))
        pre[:, 1:] = np.cumprod(t[:, :-1], axis=1)
        suf = np.ones((m, dmax))
        suf[:, :-1] = np.cumprod(t[:, :0:-1], axis=1)[:, ::-1]
        p = np.clip((pre * suf)[slot_c, slot_k], -_T_MAX, _T_MAX)
        c2v = 2.0 * np.arctanh(p)
        post = llr + np.bincount(edge_var, weights=c2v, minlength=n)
        v2c = post[edge_var] - c2v
        bits = (post < 0.0).astype(np.uint8)
        synd = np.bincount(np.repeat(np.arange(m), deg), weights=bits[edge_var], minlength=m) % 2
        if not synd.any():
            return bits, True, it
    return bits, False, max_iters
