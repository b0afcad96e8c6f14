"""Demodulator timing across short block lengths.

Each cell times ``demodulate_frame`` (input observations to output LLRs)
on a fixed received frame and reports the mean over ``reps`` calls. A
block length of ``n`` coded bits is carried on the smallest whole number of
PRBs, ``ceil(n / (2 * 8 * n_tx))``, with the default DMRS pattern.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..channel import LOS, RBF, SIMO, apply_channel, sample_channel, snr_to_n0
from ..detector import (
    CONVENTIONAL_LS,
    EXACT_LOG,
    LOS_JED,
    MAX_LOG,
    RBF_JED,
    SIMO_JED,
    FramePlan,
    ReceiverSpec,
    demodulate_frame,
    pilot_reference,
)
from ..errors import ConfigError
from ..modem import GridLayout, dmrs_generate, qpsk_map

DEFAULT_LENGTHS = (12, 24, 32, 48, 100)

# metric variants of the timing study: label -> (family is advanced, llr form)
VARIANTS = {
    "conv-log": (False, EXACT_LOG),
    "adv-log": (True, EXACT_LOG),
    "adv-maxlog": (True, MAX_LOG),
}


@dataclass(frozen=True)
class BenchSetup:
    name: str
    n_tx: int
    n_rx: int
    mode: str
    family: str  # the advanced receiver for this setup
    n_d_window: int


# Two-antenna windows hold 2 data REs: with 4 the exact-log 4x2 LOS cell
# alone would take minutes per thousand repetitions.
SETUPS = {
    "simo-4x1-los": BenchSetup("simo-4x1-los", 1, 4, SIMO, SIMO_JED, 4),
    "mimo-2x2-rbf": BenchSetup("mimo-2x2-rbf", 2, 2, RBF, RBF_JED, 2),
    "mimo-4x2-los": BenchSetup("mimo-4x2-los", 2, 4, LOS, LOS_JED, 2),
}

BENCH_COLUMNS = ("setup", "variant", "block_len", "n_prb", "reps", "mean_ms")


@dataclass(frozen=True)
class BenchRow:
    setup: str
    variant: str
    block_len: int
    n_prb: int
    reps: int
    mean_ms: float


def prbs_for(block_len: int, n_tx: int) -> int:
    if not 1 <= block_len <= 4096:
        raise ConfigError(f"block length {block_len} out of range")
    per_prb = 2 * 8 * n_tx  # QPSK bits per PRB with 8 data REs
    return math.ceil(block_len / per_prb)


def _frame(setup: BenchSetup, layout: GridLayout, snr_db: float, seed: int):
    rng = np.random.default_rng([seed, layout.n_prb, setup.n_tx])
    n0 = snr_to_n0(snr_db)
    pilots = pilot_reference(layout, dmrs_generate(seed, layout.n_pilot), 1.0, setup.n_tx)
    x = np.zeros((setup.n_tx, layout.n_total), np.complex128)
    x[:, layout.pilot_indices] = pilots
    bits = rng.integers(0, 2, layout.coded_bits(setup.n_tx), dtype=np.uint8)
    x[:, layout.data_indices] = qpsk_map(bits).reshape(-1, setup.n_tx).T
    alpha = 1.0 if setup.mode != RBF else 0.0
    real = sample_channel(setup.mode, alpha, setup.n_tx, setup.n_rx, rng)
    return apply_channel(x, real, n0, rng), pilots, real, n0


def time_cell(setup: BenchSetup, variant: str, block_len: int, reps: int = 1000, seed: int = 7) -> BenchRow:
    advanced, form = VARIANTS[variant]
    layout = GridLayout(n_prb=prbs_for(block_len, setup.n_tx))
    if advanced:
        spec = ReceiverSpec(setup.family, form, setup.n_d_window, alpha=1.0 if setup.mode != RBF else 0.0)
    else:
        spec = ReceiverSpec(CONVENTIONAL_LS, form, 1)
    plan = FramePlan(layout, setup.n_tx, spec.n_d_window)
    y, pilots, real, n0 = _frame(setup, layout, 0.0, seed)
    demodulate_frame(y, pilots, plan, spec, n0, channel=real)  # compile / warm caches
    t0 = time.perf_counter()
    for _ in range(reps):
        demodulate_frame(y, pilots, plan, spec, n0, channel=real)
    mean_ms = (time.perf_counter() - t0) / reps * 1e3
    return BenchRow(setup.name, variant, block_len, layout.n_prb, reps, mean_ms)


def bench_metrics(
    block_lengths=DEFAULT_LENGTHS,
    setups=tuple(SETUPS),
    variants=tuple(VARIANTS),
    reps: int = 1000,
    progress=None,
) -> list[BenchRow]:
    """Timing table over ``setups x variants x block_lengths``."""
    if reps < 1:
        raise ConfigError("reps must be positive")
    rows = []
    for name in setups:
        if name not in SETUPS:
            raise ConfigError(f"unknown bench setup {name!r}; use one of {tuple(SETUPS)}")
        for variant in variants:
            if variant not in VARIANTS:
                raise ConfigError(f"unknown variant {variant!r}; use one of {tuple(VARIANTS)}")
            for n in block_lengths:
                row = time_cell(SETUPS[name], variant, int(n), reps)
                rows.append(row)
                if progress:
                    progress(row)
    return rows


def write_bench_csv(path, rows) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=BENCH_COLUMNS)
        w.writeheader()
        for r in rows:
            d = asdict(r)
            d["mean_ms"] = repr(d["mean_ms"])
            w.writerow(d)
