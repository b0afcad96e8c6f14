"""Block-fading channel models and complex AWGN.

Every transmit antenna radiates unit energy per data RE and every path has
unit mean power, so the SNR in dB is simply ``-10 log10(n0)`` measured per
receive antenna per data RE (no array-gain normalisation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

SIMO = "NonCoherentSimo"
RBF = "RayleighBlockFadingMimo"
LOS = "LosMimo"
MODES = (SIMO, RBF, LOS)

_ALIASES = {"simo": SIMO, "rbf": RBF, "rayleigh": RBF, "los": LOS}

SNR_DEFINITION = "Es/N0 per receive antenna per data RE; Es = 1 per transmit antenna, E|h|^2 = 1 per path"


def canonical_mode(mode: str) -> str:
    if mode in MODES:
        return mode
    try:
        return _ALIASES[str(mode).lower()]
    except KeyError:
        raise ConfigError(f"unknown channel mode {mode!r}; use one of {MODES}") from None


def snr_to_n0(snr_db: float) -> float:
    """Noise variance per complex dimension for an SNR in dB."""
    snr_db = float(snr_db)
    if not np.isfinite(snr_db):
        raise DomainError("SNR must be finite")
    return 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class ChannelRealization:
    """One frame's channel; ``h[j, i]`` links transmit antenna j to receive antenna i."""

    mode: str
    h: np.ndarray  # (n_tx, n_rx)
    alpha: float = 0.0
    theta: np.ndarray | None = None

    @property
    def n_tx(self) -> int:
        return self.h.shape[0]

    @property
    def n_rx(self) -> int:
        return self.h.shape[1]


def _uniform_phase(rng, shape):
    return rng.uniform(0.0, 2.0 * np.pi, size=shape)


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sample_channel(mode: str, alpha: float, n_tx: int, n_rx: int, rng) -> ChannelRealization:
    """Draw one block-fading realization.

    SIMO: ``h_i = sqrt(alpha) e^{j theta_i} + sqrt(1-alpha) CN(0,1)``.
    Rayleigh MIMO: i.i.d. CN(0,1). LOS MIMO: unit-modulus, uniform phases.
    """
    mode = canonical_mode(mode)
    if n_rx < 1 or n_tx < 1:
        raise ConfigError("need at least one antenna on each side")
    if mode == SIMO:
        if not 0.0 <= alpha <= 1.0:
            raise DomainError(f"alpha must be in [0, 1], got {alpha}")
        if n_tx != 1:
            raise ConfigError("the SIMO channel has a single transmit antenna")
        theta = _uniform_phase(rng, (1, n_rx))
        h = np.sqrt(alpha) * np.exp(1j * theta)
        if alpha < 1.0:
            h = h + np.sqrt(1.0 - alpha) * _cn(rng, (1, n_rx))
        return ChannelRealization(mode, h, float(alpha), theta)
    if mode == RBF:
        return ChannelRealization(mode, _cn(rng, (n_tx, n_rx)), 0.0, None)
    if n_tx != 2:
        raise ConfigError("the LOS MIMO model needs exactly two transmit antennas")
    theta = _uniform_phase(rng, (n_tx, n_rx))
    return ChannelRealization(mode, np.exp(1j * theta), 1.0, theta)


def apply_channel(symbols, realization: ChannelRealization, n0: float, rng) -> np.ndarray:
    """``y_i[k] = sum_j h[j, i] x_j[k] + z_i[k]`` with ``z ~ CN(0, n0)``; returns ``(n_rx, n_total)``."""
    x = np.atleast_2d(np.asarray(symbols, dtype=np.complex128))
    if x.shape[0] != realization.n_tx:
        raise ConfigError(f"grid has {x.shape[0]} antennas, channel expects {realization.n_tx}")
    if n0 < 0:
        raise DomainError("noise variance cannot be negative")
    y = realization.h.T @ x
    if n0 > 0:
        y = y + np.sqrt(n0) * _cn(rng, y.shape)
    return y
