"""CRC attachment with the 3GPP generator polynomials.

Parity is linear in the message, so each (length, polynomial) pair is turned
into a binary generator matrix once and cached; attaching or checking a whole
list of candidate messages is then a single matrix product.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import ConfigError

# exponents of the generator polynomials, highest first
CRC_POLYNOMIALS = {
    8: (8, 7, 4, 3, 1, 0),
    11: (11, 10, 9, 5, 0),
    16: (16, 12, 5, 0),
    24: (24, 23, 18, 17, 14, 11, 10, 7, 6, 5, 4, 3, 1, 0),
}


def _poly_bits(crc_len: int) -> np.ndarray:
    if crc_len not in CRC_POLYNOMIALS:
        raise ConfigError(f"unsupported CRC length {crc_len}; use one of {sorted(CRC_POLYNOMIALS)}")
    g = np.zeros(crc_len + 1, dtype=np.uint8)
    for e in CRC_POLYNOMIALS[crc_len]:
        g[crc_len - e] = 1
    return g


def crc_remainder(bits, crc_len: int) -> np.ndarray:
    """Remainder of ``bits(D) * D^L`` modulo the generator, by long division."""
    g = _poly_bits(crc_len)
    reg = np.concatenate([np.asarray(bits, dtype=np.uint8) & 1, np.zeros(crc_len, np.uint8)])
    for i in range(reg.size - crc_len):
        if reg[i]:
            reg[i : i + crc_len + 1] ^= g
    return reg[-crc_len:].copy()


@lru_cache(maxsize=64)
def _generator(length: int, crc_len: int) -> np.ndarray:
    rows = np.empty((length, crc_len), dtype=np.uint8)
    unit = np.zeros(length, dtype=np.uint8)
    for k in range(length):
        unit[:] = 0
        unit[k] = 1
        rows[k] = crc_remainder(unit, crc_len)
    rows.setflags(write=False)
    return rows


def crc_parity(bits, crc_len: int) -> np.ndarray:
    """Parity bits for one message (1-D) or a stack of messages (2-D)."""
    b = np.asarray(bits, dtype=np.uint8)
    gen = _generator(b.shape[-1], crc_len)
    return ((b.astype(np.int64) @ gen) & 1).astype(np.uint8)


def crc_attach(bits, crc_len: int) -> np.ndarray:
    b = np.asarray(bits, dtype=np.uint8)
    return np.concatenate([b, crc_parity(b, crc_len)], axis=-1)


def crc_check(bits, crc_len: int):
    """True where the trailing ``crc_len`` bits match the recomputed parity.

    Works row-wise on 2-D input and returns a boolean array in that case.
    """
    b = np.asarray(bits, dtype=np.uint8)
    if b.shape[-1] <= crc_len:
        raise ConfigError(f"block of {b.shape[-1]} bits cannot carry a {crc_len}-bit CRC")
    ok = np.all(crc_parity(b[..., :-crc_len], crc_len) == b[..., -crc_len:], axis=-1)
    return bool(ok) if b.ndim == 1 else ok
