"""LDPC codes: alist I/O, systematic encoding, sum-product decoding.

Any parity-check matrix works; the encoder is derived by Gaussian
elimination over GF(2) with pivots taken from the right, so a matrix whose
parity part sits in the last columns encodes systematically with the
message in front.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .._backend import USE_NUMBA
from ..errors import ConfigError

if USE_NUMBA:
    from ._bp_nb import bp_flooding as _bp_flooding
else:
    from ._bp_np import bp_flooding as _bp_flooding

DEFAULT_ALIST = "ldpc_64_48.alist"


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary H stored as edge lists (check-major order)."""

    n_rows: int
    n_cols: int
    edge_check: np.ndarray  # check index of each edge, sorted
    edge_var: np.ndarray  # variable index of each edge

    @classmethod
    def from_dense(cls, h) -> "ParityCheckMatrix":
        h = np.asarray(h, dtype=np.uint8) & 1
        if h.ndim != 2:
            raise ConfigError("parity-check matrix must be 2-D")
        if np.any(h.sum(axis=0) == 0):
            raise ConfigError("every column of H needs at least one check")
        rows, cols = np.nonzero(h)
        return cls(h.shape[0], h.shape[1], rows.astype(np.int64), cols.astype(np.int64))

    def dense(self) -> np.ndarray:
        h = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        h[self.edge_check, self.edge_var] = 1
        return h

    @property
    def check_ptr(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(np.bincount(self.edge_check, minlength=self.n_rows))])

    def syndrome(self, bits) -> np.ndarray:
        b = np.asarray(bits, dtype=np.uint8)
        return (np.bincount(self.edge_check, weights=b[self.edge_var], minlength=self.n_rows) % 2).astype(
            np.uint8
        )


def read_alist(source) -> ParityCheckMatrix:
    """Parse the MacKay alist format (1-based indices, zero padding allowed)."""
    text = Path(source).read_text() if not hasattr(source, "read") else source.read()
    nums = [int(t) for t in text.split()]
    try:
        n, m = nums[0], nums[1]
        pos = 4
        col_deg = nums[pos : pos + n]
        pos += n
        row_deg = nums[pos : pos + m]
        pos += m
        max_col = nums[2]
        h = np.zeros((m, n), dtype=np.uint8)
        for j in range(n):
            entries = nums[pos : pos + max_col]
            pos += max_col
            for r in entries[: col_deg[j]]:
                h[r - 1, j] = 1
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"malformed alist data: {exc}") from exc
    if np.any(h.sum(axis=1) != np.asarray(row_deg)):
        raise ConfigError("alist row degrees disagree with the column lists")
    return ParityCheckMatrix.from_dense(h)


def write_alist(h: ParityCheckMatrix, path) -> None:
    d = h.dense()
    m, n = d.shape
    col_deg = d.sum(axis=0)
    row_deg = d.sum(axis=1)
    lines = [f"{n} {m}", f"{col_deg.max()} {row_deg.max()}"]
    lines.append(" ".join(map(str, col_deg)))
    lines.append(" ".join(map(str, row_deg)))
    for j in range(n):
        idx = list(np.nonzero(d[:, j])[0] + 1) + [0] * (col_deg.max() - col_deg[j])
        lines.append(" ".join(map(str, idx)))
    for i in range(m):
        idx = list(np.nonzero(d[i])[0] + 1) + [0] * (row_deg.max() - row_deg[i])
        lines.append(" ".join(map(str, idx)))
    Path(path).write_text("\n".join(lines) + "\n")


def default_matrix() -> ParityCheckMatrix:
    with resources.files("bicm_jed.data").joinpath(DEFAULT_ALIST).open("r") as fh:
        return read_alist(fh)


def _systematic_form(h: np.ndarray):
    """Reduce ``h`` to row echelon form choosing pivots from the last column backwards.

    Returns ``(r, pivots, free)`` where row ``t`` of ``r`` has a single
    pivot-column one at ``pivots[t]``.
    """
    r = h.copy()
    m, n = r.shape
    pivots = []
    row = 0
    for col in range(n - 1, -1, -1):
        if row == m:
            break
        hits = np.nonzero(r[row:, col])[0]
        if hits.size == 0:
            continue
        p = row + hits[0]
        r[[row, p]] = r[[p, row]]
        others = np.nonzero(r[:, col])[0]
        for o in others:
            if o != row:
                r[o] ^= r[row]
        pivots.append(col)
        row += 1
    pivots = np.array(pivots, dtype=np.int64)
    free = np.setdiff1d(np.arange(n), pivots)
    return r[:row], pivots, free


def ldpc_bp_decode(llrs, h: ParityCheckMatrix, max_iters: int = 30):
    """Flooding sum-product decoding.

    Returns ``(bits, converged, iterations)``. The syndrome is checked after
    every iteration and decoding stops as soon as it is zero; ``converged``
    is True exactly when the returned word satisfies every check.
    """
    llr = np.ascontiguousarray(llrs, dtype=np.float64)
    if llr.ndim != 1 or llr.size != h.n_cols:
        raise ConfigError(f"expected {h.n_cols} LLRs, got shape {llr.shape}")
    if max_iters < 1:
        raise ConfigError("max_iters must be at least 1")
    bits, converged, iters = _bp_flooding(llr, h.check_ptr, h.edge_var, int(max_iters))
    return bits, bool(converged), int(iters)


@dataclass
class LdpcDecodeResult:
    block: np.ndarray  # message + CRC as decoded
    converged: bool
    iterations: int


@dataclass
class LdpcCode:
    """Systematic LDPC code defined by a parity-check matrix."""

    h: ParityCheckMatrix
    r: np.ndarray = field(init=False, repr=False)
    pivots: np.ndarray = field(init=False, repr=False)
    info_positions: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.r, self.pivots, self.info_positions = _systematic_form(self.h.dense())

    @classmethod
    def default(cls) -> "LdpcCode":
        return cls(default_matrix())

    @property
    def n(self) -> int:
        return self.h.n_cols

    @property
    def k(self) -> int:
        return int(self.info_positions.size)

    def encode(self, message) -> np.ndarray:
        msg = np.asarray(message, dtype=np.uint8)
        if msg.shape[-1] != self.k:
            raise ConfigError(f"LDPC message must have {self.k} bits, got {msg.shape[-1]}")
        x = np.zeros(msg.shape[:-1] + (self.n,), dtype=np.uint8)
        x[..., self.info_positions] = msg
        parity = (x[..., self.info_positions].astype(np.int64) @ self.r[:, self.info_positions].T.astype(np.int64)) & 1
        x[..., self.pivots] = parity
        return x

    def decode(self, llrs, max_iters: int = 30) -> LdpcDecodeResult:
        bits, converged, iters = ldpc_bp_decode(llrs, self.h, max_iters)
        return LdpcDecodeResult(bits[self.info_positions].copy(), converged, iters)
