"""QPSK mapping, DMRS, resource-grid assembly and detection windows.

Resource elements are indexed ``(symbol * n_prb + prb) * 12 + subcarrier``;
each run of 12 consecutive REs is one PRB in one OFDM symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError

SUBCARRIERS_PER_PRB = 12
BITS_PER_SYMBOL = 2
DEFAULT_DMRS_POSITIONS = (1, 4, 7, 10)

# Gray QPSK indexed by 2*b0 + b1; positive LLR favours bit 0
QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=np.complex128) / np.sqrt(2.0)

_DMRS_TAG = 0xD3

# ---------------------------------------------------------------------------
# modulation


def qpsk_map(bits) -> np.ndarray:
    """Map an even number of bits to Gray QPSK, two bits per symbol."""
    b = np.asarray(bits, dtype=np.int64)
    if b.shape[-1] % 2:
        raise ConfigError("QPSK needs an even number of bits")
    pairs = b.reshape(b.shape[:-1] + (-1, 2))
    return QPSK[2 * pairs[..., 0] + pairs[..., 1]]


def qpsk_hard_demap(symbols) -> np.ndarray:
    """Nearest-symbol bits; inverse of :func:`qpsk_map` on clean input."""
    s = np.asarray(symbols, dtype=np.complex128)
    out = np.empty(s.shape + (2,), dtype=np.uint8)
    out[..., 0] = s.real < 0
    out[..., 1] = s.imag < 0
    return out.reshape(s.shape[:-1] + (-1,))


def dmrs_generate(seed: int, n_pilot: int) -> np.ndarray:
    """Seeded unit-modulus QPSK pilot sequence."""
    if n_pilot < 1:
        raise ConfigError("need at least one pilot")
    rng = np.random.default_rng([int(seed) & (2**63 - 1), _DMRS_TAG])
    return QPSK[rng.integers(0, 4, size=n_pilot)]


# ---------------------------------------------------------------------------
# layout


@dataclass(frozen=True)
class GridLayout:
    n_prb: int = 4
    n_ofdm_symbols: int = 1
    dmrs_positions: tuple = DEFAULT_DMRS_POSITIONS

    def __post_init__(self):
        if self.n_prb < 1 or self.n_ofdm_symbols < 1:
            raise ConfigError("layout needs at least one PRB and one OFDM symbol")
        pos = tuple(int(p) for p in self.dmrs_positions)
        if not pos or len(set(pos)) != len(pos) or min(pos) < 0 or max(pos) >= SUBCARRIERS_PER_PRB:
            raise ConfigError(f"DMRS positions must be distinct subcarriers in 0..11, got {pos}")
        object.__setattr__(self, "dmrs_positions", tuple(sorted(pos)))

    @property
    def n_blocks(self) -> int:
        return self.n_prb * self.n_ofdm_symbols

    @property
    def n_total(self) -> int:
        return SUBCARRIERS_PER_PRB * self.n_blocks

    @property
    def pilot_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_total, dtype=bool)
        for b in range(self.n_blocks):
            mask[b * SUBCARRIERS_PER_PRB + np.array(self.dmrs_positions)] = True
        return mask

    @property
    def n_pilot(self) -> int:
        return len(self.dmrs_positions) * self.n_blocks

    @property
    def n_data(self) -> int:
        return self.n_total - self.n_pilot

    @property
    def data_indices(self) -> np.ndarray:
        return np.nonzero(~self.pilot_mask)[0]

    @property
    def pilot_indices(self) -> np.ndarray:
        return np.nonzero(self.pilot_mask)[0]

    def antenna_pilot_masks(self, n_tx: int) -> np.ndarray:
        """Per-antenna pilot masks, shape ``(n_tx, n_total)``.

        The per-PRB DMRS positions are dealt round-robin to the antennas,
        so with four positions and two antennas antenna 0 gets {1, 7} and
        antenna 1 gets {4, 10}. The masks are disjoint.
        """
        if n_tx < 1 or len(self.dmrs_positions) % n_tx:
            raise ConfigError(f"{len(self.dmrs_positions)} DMRS positions cannot be split over {n_tx} antennas")
        masks = np.zeros((n_tx, self.n_total), dtype=bool)
        for j in range(n_tx):
            own = np.array(self.dmrs_positions[j::n_tx])
            for b in range(self.n_blocks):
                masks[j, b * SUBCARRIERS_PER_PRB + own] = True
        return masks

    def coded_bits(self, n_tx: int) -> int:
        """E: coded bits carried by one frame."""
        return BITS_PER_SYMBOL * self.n_data * n_tx


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class ResourceGrid:
    """Transmitted frame: one row of complex symbols per transmit antenna."""

    layout: GridLayout
    symbols: np.ndarray  # (n_tx, n_total)
    antenna_pilot_masks: np.ndarray  # (n_tx, n_total)
    beta: float

    @property
    def n_tx(self) -> int:
        return self.symbols.shape[0]

    @property
    def pilot_mask(self) -> np.ndarray:
        return self.layout.pilot_mask

    @property
    def bit_map(self) -> np.ndarray:
        """Coded-bit indices per (data RE, antenna), shape ``(n_data, n_tx, 2)``."""
        q = np.arange(self.layout.n_data * self.n_tx).reshape(self.layout.n_data, self.n_tx)
        return np.stack([2 * q, 2 * q + 1], axis=-1)

    def data_symbols(self) -> np.ndarray:
        """Data symbols in the order :func:`build_grid` accepts them."""
        return self.symbols[:, self.layout.data_indices].T.reshape(-1)

    def pilot_symbols(self) -> np.ndarray:
        """Transmitted (boosted) pilot values, shape ``(n_tx, n_pilot)``; zero where an antenna is silent."""
        return self.symbols[:, self.layout.pilot_indices]

    def energy(self) -> np.ndarray:
        return np.sum(np.abs(self.symbols) ** 2, axis=1)


def build_grid(data_symbols, dmrs, layout: GridLayout, beta: float = 1.0, n_tx: int = 1) -> ResourceGrid:
    """Place data and boosted pilots on the grid.

    ``data_symbols`` is RE-major: symbol ``r * n_tx + j`` goes to data RE
    ``r`` on antenna ``j``. ``dmrs`` has one value per pilot RE of the
    layout; each antenna transmits it on its own pilot REs only.
    """
    if not beta > 0:
        raise ConfigError(f"pilot boost must be positive, got {beta}")
    d = np.asarray(data_symbols, dtype=np.complex128)
    p = np.asarray(dmrs, dtype=np.complex128)
    if d.shape != (layout.n_data * n_tx,):
        raise ConfigError(f"expected {layout.n_data * n_tx} data symbols, got {d.shape}")
    if p.shape != (layout.n_pilot,):
        raise ConfigError(f"expected {layout.n_pilot} DMRS values, got {p.shape}")
    masks = layout.antenna_pilot_masks(n_tx)
    grid = np.zeros((n_tx, layout.n_total), dtype=np.complex128)
    grid[:, layout.data_indices] = d.reshape(layout.n_data, n_tx).T
    pilot_idx = layout.pilot_indices
    for j in range(n_tx):
        own = masks[j, pilot_idx]
        grid[j, pilot_idx[own]] = beta * p[own]
    return ResourceGrid(layout, grid, masks, float(beta))


# ---------------------------------------------------------------------------
# detection windows


@dataclass(frozen=True)
class DetectionWindow:
    """Nd consecutive data REs plus the pilots of every PRB block they touch.

    The observation fields stay ``None`` until :meth:`observe` fills them.
    """

    data_indices: np.ndarray
    pilot_indices: np.ndarray
    bit_slots: np.ndarray  # coded-bit indices, local bit b -> bit_slots[b]
    n_tx: int
    y_data: np.ndarray | None = field(default=None, repr=False)  # (n_rx, Nd)
    y_pilot: np.ndarray | None = field(default=None, repr=False)  # (n_rx, Np)
    x_pilot: np.ndarray | None = field(default=None, repr=False)  # (n_tx, Np)

    @property
    def n_d(self) -> int:
        return self.data_indices.size

    def observe(self, grid: ResourceGrid, y) -> "DetectionWindow":
        y = np.asarray(y, dtype=np.complex128)
        return replace(
            self,
            y_data=y[:, self.data_indices],
            y_pilot=y[:, self.pilot_indices],
            x_pilot=grid.symbols[:, self.pilot_indices],
        )


def partition_windows(layout: GridLayout, n_d_window: int, n_tx: int = 1) -> list[DetectionWindow]:
    """Split the data REs into consecutive windows of ``n_d_window``."""
    if n_d_window < 1 or layout.n_data % n_d_window:
        raise ConfigError(f"window size {n_d_window} does not divide {layout.n_data} data REs")
    data = layout.data_indices
    pilots = layout.pilot_indices
    per_re = BITS_PER_SYMBOL * n_tx
    windows = []
    for w in range(layout.n_data // n_d_window):
        r0 = w * n_d_window
        idx = data[r0 : r0 + n_d_window]
        blocks = np.unique(idx // SUBCARRIERS_PER_PRB)
        own = pilots[np.isin(pilots // SUBCARRIERS_PER_PRB, blocks)]
        slots = np.arange(r0 * per_re, (r0 + n_d_window) * per_re)
        windows.append(DetectionWindow(idx, own, slots, n_tx))
    return windows
