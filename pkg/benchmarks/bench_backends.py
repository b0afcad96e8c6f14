"""Numba vs numpy kernel timings.

Times the three hot kernels (window LLRs, SCL list decoding, LDPC belief
propagation) through both implementations in one process, after checking
they agree on the inputs used. The backend the package picks at import is
irrelevant here: both kernel modules are imported directly.

    python benchmarks/bench_backends.py --reps 200
"""

import argparse
import csv
import sys
import time

import numpy as np

from bicm_jed.coding import _bp_nb, _bp_np, _scl_nb, _scl_np
from bicm_jed.coding.ldpc import default_matrix
from bicm_jed.coding.polar import frozen_mask
from bicm_jed.detector import _nb as det_nb
from bicm_jed.detector import _np as det_np


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def window_case(rng, family, n_w, n_d, n_tx, n_rx, maxlog):
    y = crandn(rng, n_w, n_d, n_rx)
    xp = crandn(rng, n_w, 4, n_tx)
    yp = crandn(rng, n_w, 4, n_rx)
    p = np.einsum("wpt,wpr->wtr", xp.conj(), yp)
    cp = np.einsum("wpt,wps->wts", xp.conj(), xp)
    hk = crandn(rng, n_w, n_tx, n_rx)
    return (y, p, cp, hk, family, 0.5, 0.5, 1.0, maxlog)


def cases(rng):
    """name -> (numba callable, numpy callable, args)"""
    out = {}
    for label, family, n_d, n_tx, n_rx in [
        ("llr coherent 4x1", det_np.COHERENT, 1, 1, 4),
        ("llr simo-jed Nd=4", det_np.SIMO, 4, 1, 4),
        ("llr rbf-jed 2x2 Nd=2", det_np.RBF, 2, 2, 2),
        ("llr los-jed 4x2 Nd=2", det_np.LOS, 2, 2, 4),
    ]:
        for maxlog in (True, False):
            name = f"{label} {'maxlog' if maxlog else 'exact'}"
            n_w = 32 // n_d  # one 4-PRB frame
            out[name] = (det_nb.window_llrs, det_np.window_llrs, window_case(rng, family, n_w, n_d, n_tx, n_rx, maxlog))
    fz = frozen_mask(64, 48)
    out["scl L=8 n=64"] = (_scl_nb.scl_paths, _scl_np.scl_paths, (2.0 + 2.0 * rng.standard_normal(64), fz, 8))
    h = default_matrix()
    out["bp 30 it n=64"] = (_bp_nb.bp_flooding, _bp_np.bp_flooding, (0.5 + 1.5 * rng.standard_normal(64), h.check_ptr, h.edge_var, 30))
    return out


def mean_ms(fn, args, reps):
    fn(*args)  # compile / warm caches
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps * 1e3


def agree(a, b):
    if isinstance(a, tuple):
        return all(agree(x, y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=1e-9, atol=1e-9)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=200, help="repetitions per kernel and backend")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="optional CSV path")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    rows = []
    print(f"{'kernel':32s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, (f_nb, f_np, fargs) in cases(rng).items():
        if not agree(f_nb(*fargs), f_np(*fargs)):
            print(f"backends disagree on {name}", file=sys.stderr)
            return 1
        t_nb = mean_ms(f_nb, fargs, args.reps)
        t_np = mean_ms(f_np, fargs, max(1, args.reps // 10))
        rows.append({"kernel": name, "numba_ms": t_nb, "numpy_ms": t_np, "speedup": t_np / t_nb})
        print(f"{name:32s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}x", flush=True)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
