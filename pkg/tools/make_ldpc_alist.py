"""Generate the shipped (64, 48) quasi-cyclic LDPC parity-check matrix.

Information part: a 4 x 12 base graph with every column of weight 3, lifted
by Z = 4 with circulant shifts chosen (random restarts, fixed seed) to
minimise the number of length-4 cycles. Parity part: a 16 x 16 staircase
(dual-diagonal) block, which makes H full rank and encoding trivial.

    python3 tools/make_ldpc_alist.py src/bicm_jed/data/ldpc_64_48.alist
"""

import argparse

import numpy as np

from bicm_jed.coding.ldpc import ParityCheckMatrix, write_alist

Z = 4
BASE_ROWS, BASE_INFO_COLS = 4, 12


def circulant(shift: int) -> np.ndarray:
    return np.roll(np.eye(Z, dtype=np.uint8), shift, axis=1)


def lift(mask: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    h = np.zeros((BASE_ROWS * Z, BASE_INFO_COLS * Z), dtype=np.uint8)
    for r in range(BASE_ROWS):
        for c in range(BASE_INFO_COLS):
            if mask[r, c]:
                h[r * Z : (r + 1) * Z, c * Z : (c + 1) * Z] = circulant(shifts[r, c])
    return h


def four_cycles(h: np.ndarray) -> int:
    overlap = h.astype(np.int64) @ h.T.astype(np.int64)
    np.fill_diagonal(overlap, 0)
    return int(np.sum(overlap * (overlap - 1)) // 4)


def build(seed: int, restarts: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    # each base column skips one row, spread evenly over the four rows
    mask = np.ones((BASE_ROWS, BASE_INFO_COLS), dtype=np.uint8)
    for c in range(BASE_INFO_COLS):
        mask[c % BASE_ROWS, c] = 0
    best, best_cycles = None, None
    for _ in range(restarts):
        shifts = rng.integers(0, Z, size=mask.shape)
        info = lift(mask, shifts)
        parity = np.eye(BASE_ROWS * Z, dtype=np.uint8) + np.eye(BASE_ROWS * Z, k=-1, dtype=np.uint8)
        h = np.concatenate([info, parity], axis=1)
        cyc = four_cycles(h)
        if best_cycles is None or cyc < best_cycles:
            best, best_cycles = h, cyc
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--restarts", type=int, default=4000)
    args = ap.parse_args()
    h = build(args.seed, args.restarts)
    write_alist(ParityCheckMatrix.from_dense(h), args.out)
    print(f"wrote {h.shape[0]}x{h.shape[1]} matrix with {four_cycles(h)} four-cycles to {args.out}")


if __name__ == "__main__":
    main()
