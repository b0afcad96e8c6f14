"""Per-window soft demapping for every receiver family.

Families
--------
PerfectCsi          coherent metric with the true channel (genie)
ConventionalLs      LS estimate from the window's pilots, then the coherent metric
NonCoherentSimoJed  unknown-phase Ricean SIMO metric with the pilot term spliced in
MimoRbfJed          Rayleigh block-fading MIMO metric (pilot Gram + data)
MimoLosJed          two-antenna LOS metric, one Bessel term per (tx, rx) pair

Each window's hypotheses are all QPSK completions of its data REs; pilots
enter only through ``P = X_p^H Y_p`` and ``C_p = X_p^H X_p``. Since pilot and
data REs are disjoint, ``X^H Y = P + X_d^H Y_d`` exactly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .._backend import USE_NUMBA
from ..channel import ChannelRealization
from ..errors import ConfigError, DomainError
from ..coding.ratematch import deinterleave
from ..modem import DetectionWindow, GridLayout, build_grid, partition_windows
from ..numerics import _check_n0
from . import _np

if USE_NUMBA:
    from ._nb import window_llrs as _kernel
else:
    _kernel = _np.window_llrs

PERFECT_CSI = "PerfectCsi"
CONVENTIONAL_LS = "ConventionalLs"
SIMO_JED = "NonCoherentSimoJed"
RBF_JED = "MimoRbfJed"
LOS_JED = "MimoLosJed"
FAMILIES = (PERFECT_CSI, CONVENTIONAL_LS, SIMO_JED, RBF_JED, LOS_JED)

EXACT_LOG = "ExactLog"
MAX_LOG = "MaxLog"
LLR_FORMS = (EXACT_LOG, MAX_LOG)

_FAMILY_CODE = {
    PERFECT_CSI: _np.COHERENT,
    CONVENTIONAL_LS: _np.COHERENT,
    SIMO_JED: _np.SIMO,
    RBF_JED: _np.RBF,
    LOS_JED: _np.LOS,
}

# beyond this many hypotheses per window enumeration is refused
MAX_HYPOTHESIS_BITS = 20


@dataclass(frozen=True)
class ReceiverSpec:
    """Which metric to run and how.

    ``diffuse_gain`` scales the diffuse-power term in the SIMO metric,
    ``L_x = n0 + gain (1 - alpha) ||x||^2``. The default 1 matches a CN(0,1)
    diffuse component; 2 gives the variant with real-dimension variances.
    """

    family: str
    llr_form: str = MAX_LOG
    n_d_window: int | None = None
    alpha: float = 1.0
    diffuse_gain: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown receiver family {self.family!r}; use one of {FAMILIES}")
        if self.llr_form not in LLR_FORMS:
            raise ConfigError(f"unknown LLR form {self.llr_form!r}; use one of {LLR_FORMS}")
        if self.n_d_window is None:
            default = 1 if self.family in (PERFECT_CSI, CONVENTIONAL_LS) else 4
            object.__setattr__(self, "n_d_window", default)
        if self.n_d_window < 1:
            raise ConfigError("window size must be positive")
        if self.family == CONVENTIONAL_LS and self.n_d_window != 1:
            raise ConfigError("the conventional LS receiver decides one data RE at a time (n_d_window = 1)")
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must be in [0, 1], got {self.alpha}")
        if not self.diffuse_gain > 0:
            raise ConfigError("diffuse_gain must be positive")

    @property
    def maxlog(self) -> bool:
        return self.llr_form == MAX_LOG

    def check_antennas(self, n_tx: int) -> None:
        if self.family == SIMO_JED and n_tx != 1:
            raise ConfigError("the non-coherent SIMO metric needs one transmit antenna")
        if self.family == LOS_JED and n_tx != 2:
            raise ConfigError("the LOS MIMO metric needs exactly two transmit antennas")
        if 2 * n_tx * self.n_d_window > MAX_HYPOTHESIS_BITS:
            raise ConfigError(
                f"window of {self.n_d_window} REs x {n_tx} antennas has too many hypotheses to enumerate"
            )


# ---------------------------------------------------------------------------
# window arrays


def _pilot_stats(x_pilot, y_pilot):
    """``P = X_p^H Y_p`` and ``C_p = X_p^H X_p`` for one window."""
    xc = np.conj(x_pilot)
    return xc @ y_pilot.T, xc @ x_pilot.T


def _require_observed(window: DetectionWindow):
    if window.y_data is None:
        raise ConfigError("window has no observation; call window.observe(grid, y) first")


def _single(window: DetectionWindow, h=None):
    _require_observed(window)
    p, cp = _pilot_stats(window.x_pilot, window.y_pilot)
    n_tx, n_rx = p.shape
    hk = np.zeros((1, n_tx, n_rx), np.complex128) if h is None else np.asarray(h, np.complex128).reshape(1, n_tx, n_rx)
    return (
        np.ascontiguousarray(window.y_data.T[None]),
        p[None],
        cp[None],
        hk,
    )


def ls_channel_estimate(window: DetectionWindow, antenna: int | None = None) -> np.ndarray:
    """Joint LS estimate ``C_p^-1 X_p^H Y_p`` from the window's pilots.

    Returns the ``(n_tx, n_rx)`` matrix, or its column for one receive
    antenna. With one transmit antenna this is ``x_p^H y_i / ||x_p||^2``.
    """
    _require_observed(window)
    p, cp = _pilot_stats(window.x_pilot, window.y_pilot)
    est = _ls_from_stats(p[None], cp[None])[0]
    return est if antenna is None else est[:, antenna]


def _ls_from_stats(p, cp):
    diag = np.real(np.diagonal(cp, axis1=1, axis2=2))
    if np.any(diag <= 0.0):
        raise ConfigError("a transmit antenna has no pilot energy in this window")
    return np.linalg.solve(cp, p)


def _run(arrays, family_code, n0, alpha, gain, maxlog):
    y, p, cp, hk = arrays
    return _kernel(y, p, cp, hk, family_code, float(n0), float(alpha), float(gain), bool(maxlog))


def llr_perfect_csi(window: DetectionWindow, h, n0: float, llr_form: str = MAX_LOG) -> np.ndarray:
    """Coherent metric with the true channel ``h`` (``(n_tx, n_rx)`` or per-antenna gains)."""
    n0 = _check_n0(n0)
    arrays = _single(window, h)
    return _run(arrays, _np.COHERENT, n0, 0.0, 1.0, llr_form == MAX_LOG)[0]


def llr_conventional_ls(window: DetectionWindow, n0: float, llr_form: str = MAX_LOG) -> np.ndarray:
    """LS estimate from the pilots, substituted into the coherent metric."""
    n0 = _check_n0(n0)
    if window.n_d != 1:
        raise ConfigError("the conventional LS receiver works on single-RE windows")
    y, p, cp, _ = _single(window)
    hk = _ls_from_stats(p, cp)
    return _run((y, p, cp, hk), _np.COHERENT, n0, 0.0, 1.0, llr_form == MAX_LOG)[0]


def llr_noncoherent_simo(
    window: DetectionWindow, alpha: float, n0: float, llr_form: str = MAX_LOG, diffuse_gain: float = 1.0
) -> np.ndarray:
    """Unknown-phase Ricean SIMO metric with the pilots spliced into ``x^H y``."""
    n0 = _check_n0(n0)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must be in [0, 1], got {alpha}")
    if window.n_tx != 1:
        raise ConfigError("the non-coherent SIMO metric needs one transmit antenna")
    return _run(_single(window), _np.SIMO, n0, alpha, diffuse_gain, llr_form == MAX_LOG)[0]


def llr_mimo_rbf(window: DetectionWindow, n0: float, llr_form: str = MAX_LOG) -> np.ndarray:
    """Rayleigh block-fading MIMO metric."""
    n0 = _check_n0(n0)
    if window.n_tx not in (1, 2):
        raise ConfigError("the MIMO metric supports one or two transmit antennas")
    return _run(_single(window), _np.RBF, n0, 0.0, 1.0, llr_form == MAX_LOG)[0]


def llr_mimo_los(window: DetectionWindow, n0: float, llr_form: str = MAX_LOG) -> np.ndarray:
    """Two-antenna LOS metric under the orthogonal-signals premise."""
    n0 = _check_n0(n0)
    if window.n_tx != 2:
        raise ConfigError("the LOS MIMO metric needs exactly two transmit antennas")
    return _run(_single(window), _np.LOS, n0, 1.0, 1.0, llr_form == MAX_LOG)[0]


def window_metric_table(window: DetectionWindow, spec: ReceiverSpec, n0: float, h=None) -> np.ndarray:
    """Score every hypothesis of one window with the numpy reference path.

    Entry ``t`` belongs to the hypothesis whose local bit ``b`` is
    ``(t >> b) & 1``. The per-bit LLRs of the window follow from class-wise
    max (or log-sum-exp) of this table.
    """
    y, p, cp, hk = _single(window, h)
    if spec.family == CONVENTIONAL_LS:
        hk = _ls_from_stats(p, cp)
    alpha = 1.0 if spec.family == LOS_JED else spec.alpha
    return _np.metric_table(
        y, p, cp, hk, _FAMILY_CODE[spec.family], _check_n0(n0), alpha, spec.diffuse_gain, spec.maxlog
    )[0]


# ---------------------------------------------------------------------------
# whole frames


@dataclass
class FramePlan:
    """Window index tables for one (layout, n_tx, window size) combination."""

    layout: GridLayout
    n_tx: int
    n_d_window: int
    windows: list = field(init=False, repr=False)
    data_idx: np.ndarray = field(init=False, repr=False)  # (W, Nd)
    pilot_membership: np.ndarray = field(init=False, repr=False)  # (W, n_pilot)
    slots: np.ndarray = field(init=False, repr=False)  # (W, nb)

    def __post_init__(self):
        self.windows = partition_windows(self.layout, self.n_d_window, self.n_tx)
        self.data_idx = np.stack([w.data_indices for w in self.windows])
        pilots = self.layout.pilot_indices
        self.pilot_membership = np.stack([np.isin(pilots, w.pilot_indices) for w in self.windows]).astype(float)
        self.slots = np.stack([w.bit_slots for w in self.windows])

    @property
    def n_windows(self) -> int:
        return len(self.windows)


def pilot_reference(layout: GridLayout, dmrs, beta: float, n_tx: int) -> np.ndarray:
    """Known transmitted pilot values per antenna at the layout's pilot REs, ``(n_tx, n_pilot)``."""
    grid = build_grid(np.zeros(layout.n_data * n_tx), dmrs, layout, beta, n_tx)
    return grid.pilot_symbols()


def frame_arrays(y, pilots, plan: FramePlan, spec: ReceiverSpec, channel: ChannelRealization | None):
    """Stack the per-window kernel inputs for a received frame."""
    y = np.asarray(y, dtype=np.complex128)
    y_pilot = y[:, plan.layout.pilot_indices]
    wm = plan.pilot_membership
    xc = np.conj(pilots)
    p = np.einsum("wp,jp,ip->wji", wm, xc, y_pilot)
    cp = np.einsum("wp,jp,lp->wjl", wm, xc, pilots)
    y_data = np.ascontiguousarray(np.transpose(y[:, plan.data_idx], (1, 2, 0)))
    n_tx, n_rx = p.shape[1], p.shape[2]
    if spec.family == PERFECT_CSI:
        if channel is None:
            raise ConfigError("the perfect-CSI receiver needs the channel realization")
        hk = np.broadcast_to(channel.h, (plan.n_windows, n_tx, n_rx)).copy()
    elif spec.family == CONVENTIONAL_LS:
        hk = _ls_from_stats(p, cp)
    else:
        hk = np.zeros((plan.n_windows, n_tx, n_rx), np.complex128)
    return y_data, p, cp, hk


def demodulate_frame(
    y,
    pilots,
    plan: FramePlan,
    spec: ReceiverSpec,
    n0: float,
    channel: ChannelRealization | None = None,
    perm=None,
    workers: int = 1,
) -> np.ndarray:
    """LLRs for every coded bit of a frame, in codeword order.

    Windows are independent; with ``workers > 1`` they are split over
    threads and the result is identical to the sequential one. If ``perm``
    (the interleaver permutation) is given the output is deinterleaved.
    """
    n0 = _check_n0(n0)
    spec.check_antennas(plan.n_tx)
    y_data, p, cp, hk = frame_arrays(y, pilots, plan, spec, channel)
    alpha = 1.0 if spec.family == LOS_JED else spec.alpha
    args = (_FAMILY_CODE[spec.family], n0, float(alpha), float(spec.diffuse_gain), spec.maxlog)
    if workers > 1 and plan.n_windows > 1:
        parts = np.array_split(np.arange(plan.n_windows), min(workers, plan.n_windows))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = pool.map(lambda ix: _kernel(y_data[ix], p[ix], cp[ix], hk[ix], *args), parts)
            llr_w = np.concatenate(list(chunks), axis=0)
    else:
        llr_w = _kernel(y_data, p, cp, hk, *args)
    llr = np.empty(plan.slots.size)
    llr[plan.slots.reshape(-1)] = llr_w.reshape(-1)
    if perm is not None:
        llr = deinterleave(llr, perm)
    return llr


__all__ = [
    "CONVENTIONAL_LS",
    "EXACT_LOG",
    "FAMILIES",
    "FramePlan",
    "LLR_FORMS",
    "LOS_JED",
    "MAX_LOG",
    "PERFECT_CSI",
    "RBF_JED",
    "ReceiverSpec",
    "SIMO_JED",
    "demodulate_frame",
    "frame_arrays",
    "llr_conventional_ls",
    "llr_mimo_los",
    "llr_mimo_rbf",
    "llr_noncoherent_simo",
    "llr_perfect_csi",
    "ls_channel_estimate",
    "pilot_reference",
    "window_metric_table",
]
