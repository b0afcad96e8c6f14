"""Circular-buffer rate matching and the seeded bit interleaver."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError

# second word of the interleaver seed; keeps the permutation stream apart
# from every other use of the run seed
_INTERLEAVER_TAG = 0x1A7E


def rate_match(code_bits, e_target: int) -> np.ndarray:
    """Read ``e_target`` bits from the circular buffer of ``code_bits``.

    Longer targets repeat from the start; shorter ones drop the tail.
    """
    bits = np.asarray(code_bits)
    if e_target < 1:
        raise ConfigError("rate-matching target must be at least 1 bit")
    if bits.size == 0:
        raise ConfigError("nothing to rate-match")
    return bits[np.arange(e_target) % bits.size]


def derate_match(llrs, n_code: int) -> np.ndarray:
    """Fold rate-matched LLRs back onto ``n_code`` positions.

    Repeated copies add; punctured positions come back as 0.
    """
    v = np.asarray(llrs, dtype=np.float64)
    pos = np.arange(v.size) % n_code
    return np.bincount(pos, weights=v, minlength=n_code)


def make_permutation(seed: int, length: int) -> np.ndarray:
    """Fixed pseudo-random permutation of ``range(length)`` for a run seed."""
    if length < 1:
        raise ConfigError("interleaver length must be positive")
    return np.random.default_rng([int(seed) & (2**63 - 1), _INTERLEAVER_TAG]).permutation(length)


def interleave(bits, perm) -> np.ndarray:
    """``out[k] = bits[perm[k]]``."""
    b = np.asarray(bits)
    if b.shape[-1] != len(perm):
        raise ConfigError(f"interleaver expects {len(perm)} bits, got {b.shape[-1]}")
    return b[..., perm]


def deinterleave(values, perm) -> np.ndarray:
    """Inverse of :func:`interleave`, for bits or LLRs."""
    v = np.asarray(values)
    if v.shape[-1] != len(perm):
        raise ConfigError(f"deinterleaver expects {len(perm)} values, got {v.shape[-1]}")
    out = np.empty_like(v)
    out[..., perm] = v
    return out
