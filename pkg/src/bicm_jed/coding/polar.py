"""Polar codes with CRC-aided successive-cancellation list decoding.

Codewords are ``x = u F^{(x)n}`` in natural (non bit-reversed) order with
``F = [[1, 0], [1, 1]]``. The information set is picked with the
polarization-weight (beta-expansion) reliability order instead of the
1024-entry 3GPP sequence table.

LLR convention everywhere: positive favours bit 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._backend import USE_NUMBA
from ..errors import ConfigError
from .crc import crc_attach, crc_check

LIST_SIZES = (1, 2, 4, 8, 16, 32, 64, 128, 256)

if USE_NUMBA:
    from ._scl_nb import scl_paths as _scl_paths
else:
    from ._scl_np import scl_paths as _scl_paths


def polarization_weights(n_code: int) -> np.ndarray:
    """Beta-expansion weights ``sum_j b_j 2^(j/4)`` over the bits of each index."""
    _check_pow2(n_code)
    n = n_code.bit_length() - 1
    idx = np.arange(n_code)
    w = np.zeros(n_code)
    for j in range(n):
        w += ((idx >> j) & 1) * 2.0 ** (j / 4.0)
    return w


def frozen_mask(n_code: int, k: int) -> np.ndarray:
    """Boolean mask of frozen positions; the ``k`` most reliable stay free."""
    if not 0 < k <= n_code:
        raise ConfigError(f"cannot place {k} message bits in a length-{n_code} polar code")
    order = np.lexsort((np.arange(n_code), polarization_weights(n_code)))
    mask = np.ones(n_code, dtype=bool)
    mask[order[n_code - k :]] = False
    return mask


def _check_pow2(n_code: int) -> None:
    if n_code < 2 or n_code & (n_code - 1):
        raise ConfigError(f"polar length must be a power of two >= 2, got {n_code}")


def polar_transform(u) -> np.ndarray:
    """``u F^{(x)n}`` over GF(2) by the butterfly network; works row-wise on 2-D input."""
    x = np.array(u, dtype=np.uint8, copy=True)
    n_code = x.shape[-1]
    _check_pow2(n_code)
    lead = x.shape[:-1]
    half = n_code // 2
    while half >= 1:
        v = x.reshape(lead + (-1, 2, half))
        v[..., 0, :] ^= v[..., 1, :]
        half //= 2
    return x


def polar_encode(message, n_code: int, frozen) -> np.ndarray:
    """Place ``message`` on the free positions of ``frozen`` and transform."""
    msg = np.asarray(message, dtype=np.uint8)
    fz = np.asarray(frozen)
    if fz.dtype != bool:
        mask = np.zeros(n_code, dtype=bool)
        mask[fz] = True
        fz = mask
    if fz.size != n_code or msg.shape[-1] != n_code - int(fz.sum()):
        raise ConfigError(
            f"message of {msg.shape[-1]} bits does not fit {n_code - int(fz.sum())} free positions"
        )
    u = np.zeros(msg.shape[:-1] + (n_code,), dtype=np.uint8)
    u[..., ~fz] = msg
    return polar_transform(u)


def _f_exact(a, b):
    return (
        np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )


def sc_decode(llrs, frozen) -> np.ndarray:
    """Plain recursive successive-cancellation decoding; returns the full ``u``."""
    llrs = np.asarray(llrs, dtype=np.float64)
    frozen = np.asarray(frozen, dtype=bool)

    def rec(lam, fz):
        if lam.size == 1:
            bit = 0 if fz[0] or lam[0] >= 0.0 else 1
            return np.array([bit], np.uint8), np.array([bit], np.uint8)
        h = lam.size // 2
        ua, xa = rec(_f_exact(lam[:h], lam[h:]), fz[:h])
        ub, xb = rec(lam[h:] + (1.0 - 2.0 * xa) * lam[:h], fz[h:])
        return np.concatenate([ua, ub]), np.concatenate([xa ^ xb, xb])

    return rec(llrs, frozen)[0]


def scl_decode_paths(llrs, frozen, list_size: int):
    """Run the list decoder and return every surviving path.

    Returns ``(u, metrics)``: ``u`` holds one row per path, ``metrics`` the
    path penalties (lower is more likely). Equal penalties keep the bit-0
    extension first.
    """
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    frozen = np.ascontiguousarray(frozen, dtype=np.bool_)
    if list_size not in LIST_SIZES:
        raise ConfigError(f"list size must be one of {LIST_SIZES}, got {list_size}")
    if llrs.size != frozen.size:
        raise ConfigError("LLR length does not match the code length")
    _check_pow2(llrs.size)
    return _scl_paths(llrs, frozen, list_size)


@dataclass
class DecodeResult:
    block: np.ndarray  # message + CRC as decoded
    crc_ok: bool


@dataclass
class PolarCode:
    """Length-``n_code`` polar code carrying ``k`` bits (payload plus CRC)."""

    n_code: int
    k: int
    frozen: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        _check_pow2(self.n_code)
        self.frozen = frozen_mask(self.n_code, self.k)

    @classmethod
    def for_rate_matched(cls, k: int, e: int) -> "PolarCode":
        """Smallest power-of-two mother code that covers ``e`` output bits."""
        if e < k:
            raise ConfigError(f"E={e} is shorter than the {k}-bit message")
        n_code = 1 << max(1, int(np.ceil(np.log2(e))))
        if n_code <= k:
            n_code *= 2
        return cls(n_code, k)

    def encode(self, block) -> np.ndarray:
        return polar_encode(block, self.n_code, self.frozen)

    def decode(self, llrs, list_size: int = 8, crc_len: int | None = 11) -> DecodeResult:
        """CA-SCL: the best CRC-passing path, else the best path flagged as failed."""
        return ca_scl_decode(llrs, list_size, self.frozen, crc_len)


def ca_scl_decode(llrs, list_size: int, frozen, crc_len: int | None) -> DecodeResult:
    """Most likely CRC-passing path of the list decoder.

    With ``crc_len`` falsy this is plain SCL (best path, always reported as
    passing). If no path passes, the best path comes back with ``crc_ok``
    False so the caller counts a block error.
    """
    frozen = np.asarray(frozen, dtype=bool)
    u, metric = scl_decode_paths(llrs, frozen, list_size)
    blocks = u[:, ~frozen]
    order = np.argsort(metric, kind="stable")
    if crc_len:
        passing = crc_check(blocks, crc_len)
        for p in order:
            if passing[p]:
                return DecodeResult(blocks[p].copy(), True)
        return DecodeResult(blocks[order[0]].copy(), False)
    return DecodeResult(blocks[order[0]].copy(), True)


def attach_and_encode(payload, code: PolarCode, crc_len: int) -> np.ndarray:
    return code.encode(crc_attach(payload, crc_len))
