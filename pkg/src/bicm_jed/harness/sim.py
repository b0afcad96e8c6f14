"""Monte-Carlo BLER engine.

Trials are grouped into fixed-size chunks processed in order. Early stopping
is decided on chunk boundaries only, so a point's trial count, like its
error count, depends on nothing but the configuration and seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .._backend import backend_name
from ..channel import SNR_DEFINITION, apply_channel, sample_channel, snr_to_n0
from ..coding.crc import crc_attach, crc_check
from ..coding.ldpc import LdpcCode, read_alist
from ..coding.polar import PolarCode, ca_scl_decode
from ..coding.ratematch import derate_match, interleave, make_permutation, rate_match
from ..detector import FramePlan, demodulate_frame, pilot_reference
from ..errors import ConfigError
from ..modem import dmrs_generate, qpsk_map
from . import rng as rngs
from .config import SimConfig

CSV_COLUMNS = (
    "snr_db",
    "trials",
    "block_errors",
    "bler",
    "receiver_family",
    "llr_form",
    "nd_window",
    "alpha",
    "beta",
    "code",
    "n_tx",
    "n_rx",
    "seed",
    "wall_time_s",
)


@dataclass(frozen=True)
class BlerPoint:
    snr_db: float
    trials: int
    block_errors: int
    wall_time_s: float
    fingerprint: str = ""

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials if self.trials else math.nan


# ---------------------------------------------------------------------------
# link


class Link:
    """Everything about a configuration that does not change between trials."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.spec = cfg.receiver_spec()
        lay = cfg.layout
        self.e = cfg.coded_bits
        if cfg.code.type == "polar":
            self.polar = PolarCode.for_rate_matched(cfg.code.block_len, self.e)
            self.n_code = self.polar.n_code
        else:
            h = read_alist(cfg.code.ldpc_matrix) if cfg.code.ldpc_matrix else None
            self.ldpc = LdpcCode(h) if h is not None else LdpcCode.default()
            if self.ldpc.k != cfg.code.block_len:
                raise ConfigError(f"LDPC matrix carries {self.ldpc.k} bits, config asks for {cfg.code.block_len}")
            self.n_code = self.ldpc.n
        self.perm = make_permutation(cfg.seed, self.e)
        self.dmrs = dmrs_generate(cfg.seed, lay.n_pilot)
        self.pilots = pilot_reference(lay, self.dmrs, cfg.beta, cfg.n_tx)
        self.template = np.zeros((cfg.n_tx, lay.n_total), np.complex128)
        self.template[:, lay.pilot_indices] = self.pilots
        self.data_idx = lay.data_indices
        self.plan = FramePlan(lay, cfg.n_tx, self.spec.n_d_window)

    def encode(self, payload) -> np.ndarray:
        block = crc_attach(payload, self.cfg.code.crc_len)
        cw = self.polar.encode(block) if self.cfg.code.type == "polar" else self.ldpc.encode(block)
        return interleave(rate_match(cw, self.e), self.perm)

    def frame(self, tx_bits) -> np.ndarray:
        x = self.template.copy()
        x[:, self.data_idx] = qpsk_map(tx_bits).reshape(-1, self.cfg.n_tx).T
        return x

    def decode(self, llr):
        """Returns ``(payload, crc_ok)``."""
        code = self.cfg.code
        soft = derate_match(llr, self.n_code)
        if code.type == "polar":
            res = ca_scl_decode(soft, code.list_size, self.polar.frozen, code.crc_len)
            return res.block[: code.payload_len], res.crc_ok
        res = self.ldpc.decode(soft, code.bp_iters)
        return res.block[: code.payload_len], bool(crc_check(res.block, code.crc_len))

    def trial(self, point: int, trial: int, n0: float) -> bool:
        """Run one transport block; True on block error."""
        cfg = self.cfg
        r_msg, r_ch, r_noise = rngs.trial_streams(cfg.seed, point, trial)
        payload = r_msg.integers(0, 2, cfg.code.payload_len, dtype=np.uint8)
        x = self.frame(self.encode(payload))
        real = sample_channel(cfg.channel.mode, cfg.channel.alpha, cfg.n_tx, cfg.n_rx, r_ch)
        y = apply_channel(x, real, n0, r_noise)
        llr = demodulate_frame(y, self.pilots, self.plan, self.spec, n0, channel=real, perm=self.perm)
        decoded, ok = self.decode(llr)
        return (not ok) or not np.array_equal(decoded, payload)


@lru_cache(maxsize=8)
def _link_for(cfg_json: str) -> Link:
    return Link(SimConfig.from_dict(json.loads(cfg_json)))


def _run_chunk(cfg_json: str, point: int, snr_db: float, start: int, stop: int) -> int:
    link = _link_for(cfg_json)
    n0 = snr_to_n0(snr_db)
    return sum(link.trial(point, t, n0) for t in range(start, stop))


def run_point(
    cfg: SimConfig,
    snr_db: float,
    point_index: int = 0,
    trials: int | None = None,
    early_stop_errors: int | None | bool = True,
    workers: int | None = None,
) -> BlerPoint:
    """Simulate one SNR point.

    ``early_stop_errors=True`` uses the configured threshold, ``None`` or
    ``False`` disables stopping. Results do not depend on ``workers``.
    """
    trials = cfg.trials_per_point if trials is None else int(trials)
    if early_stop_errors is True:
        early_stop_errors = cfg.early_stop_errors
    elif early_stop_errors is False:
        early_stop_errors = None
    workers = cfg.workers if workers is None else workers
    cfg_json = json.dumps(cfg.to_dict(), sort_keys=True)
    _link_for(cfg_json)  # configuration errors surface before any trial
    bounds = [(s, min(s + cfg.chunk_size, trials)) for s in range(0, trials, cfg.chunk_size)]
    t0 = time.perf_counter()
    errors = 0
    done = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        step = workers if pool else 1
        for w0 in range(0, len(bounds), step):
            wave = bounds[w0 : w0 + step]
            if pool:
                counts = list(pool.map(_run_chunk, *zip(*[(cfg_json, point_index, snr_db, a, b) for a, b in wave])))
            else:
                counts = [_run_chunk(cfg_json, point_index, snr_db, *wave[0])]
            stop = False
            for (a, b), c in zip(wave, counts):
                errors += c
                done = b
                if early_stop_errors is not None and errors >= early_stop_errors:
                    stop = True
                    break
            if stop:
                break
    finally:
        if pool:
            pool.shutdown()
    return BlerPoint(float(snr_db), done, errors, time.perf_counter() - t0, cfg.fingerprint())


# ---------------------------------------------------------------------------
# sweeps and output


def _check_writable(path: Path) -> None:
    parent = path.resolve().parent
    if not parent.is_dir():
        raise OSError(f"output directory {parent} does not exist")
    if path.exists() and not os.access(path, os.W_OK):
        raise OSError(f"output file {path} is not writable")
    try:
        fd, probe = tempfile.mkstemp(dir=parent, prefix=".probe-")
    except OSError as exc:
        raise OSError(f"cannot write to {parent}: {exc}") from exc
    os.close(fd)
    os.unlink(probe)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.resolve().parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_rows(cfg: SimConfig, points) -> list[dict]:
    spec = cfg.receiver_spec()
    rows = []
    for p in points:
        rows.append(
            {
                "snr_db": repr(p.snr_db),
                "trials": p.trials,
                "block_errors": p.block_errors,
                "bler": repr(p.bler),
                "receiver_family": spec.family,
                "llr_form": spec.llr_form,
                "nd_window": spec.n_d_window,
                "alpha": repr(spec.alpha),
                "beta": repr(cfg.beta),
                "code": cfg.code.type,
                "n_tx": cfg.n_tx,
                "n_rx": cfg.n_rx,
                "seed": cfg.seed,
                "wall_time_s": repr(round(p.wall_time_s, 6)),
            }
        )
    return rows


def write_csv(path, cfg: SimConfig, points) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(csv_rows(cfg, points))
    _atomic_write(Path(path), buf.getvalue())


def read_csv(path) -> list[dict]:
    """Parse a results CSV back into typed rows."""
    ints = {"trials", "block_errors", "nd_window", "n_tx", "n_rx", "seed"}
    floats = {"snr_db", "bler", "alpha", "beta", "wall_time_s"}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                {k: int(v) if k in ints else float(v) if k in floats else v for k, v in row.items()}
            )
    return out


def metadata(cfg: SimConfig) -> dict:
    return {
        "config": cfg.to_dict(),
        "fingerprint": cfg.fingerprint(),
        "crc_split": {
            "payload_bits": cfg.code.payload_len,
            "crc_len": cfg.code.crc_len,
            "block_len": cfg.code.block_len,
        },
        "coded_bits": cfg.coded_bits,
        "snr_definition": SNR_DEFINITION,
        "transmit_power": "unit energy per transmit antenna per data RE (no 1/n_tx scaling)",
        "pilot_energy_in_metric": "boosted pilot energy beta^2 * N_p is part of ||x||^2",
        "backend": backend_name(),
    }


def meta_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".meta.json")


def run_sweep(cfg: SimConfig, out=None, progress=None) -> list[BlerPoint]:
    """Simulate every SNR of the grid; optionally write CSV plus metadata sidecar."""
    if out is not None:
        out = Path(out)
        _check_writable(out)
    Link(cfg)
    points = []
    for snr in cfg.snr_db_grid:
        p = run_point(cfg, snr, point_index=_point_index(snr))
        points.append(p)
        if progress:
            progress(p)
    if out is not None:
        write_csv(out, cfg, points)
        _atomic_write(meta_path(out), json.dumps(metadata(cfg), indent=2, sort_keys=True) + "\n")
    return points


# ---------------------------------------------------------------------------
# crossing search


@dataclass(frozen=True)
class Crossing:
    snr_db: float
    points: tuple  # every BlerPoint simulated, in order

    def bler_at(self, snr_db: float):
        for p in reversed(self.points):
            if abs(p.snr_db - snr_db) < 1e-9:
                return p
        return None


def _point_index(snr_db: float) -> int:
    # the stream key follows the SNR value, so the same SNR always sees the
    # same trials regardless of search path
    return int(round(snr_db * 1000)) & 0xFFFFFFFF


def find_crossing(
    cfg: SimConfig,
    target: float = 1e-2,
    start_db: float = 0.0,
    coarse_step: float = 1.0,
    fine_step: float = 0.25,
    coarse_trials: int = 2000,
    fine_trials: int = 10000,
    max_steps: int = 40,
) -> Crossing:
    """SNR where BLER falls through ``target``.

    A coarse scan brackets the crossing within ``coarse_step``; the
    ``fine_step`` grid inside the bracket is screened with the coarse trial
    budget; the two grid points around the crossing are then rerun with
    ``fine_trials`` (no early stop) and log10(BLER) is interpolated
    linearly between them.
    """
    points = []

    def sim(s, n, early):
        p = run_point(cfg, s, _point_index(s), trials=n, early_stop_errors=early)
        points.append(p)
        return p.bler

    s = round(start_db / fine_step) * fine_step
    b = sim(s, coarse_trials, True)
    if b > target:
        for _ in range(max_steps):
            hi = s + coarse_step
            if sim(hi, coarse_trials, True) <= target:
                lo = s
                break
            s = hi
        else:
            raise RuntimeError("BLER never fell below target in the search range")
    else:
        for _ in range(max_steps):
            lo = s - coarse_step
            if sim(lo, coarse_trials, True) > target:
                hi = s
                break
            s = lo
        else:
            raise RuntimeError("BLER never rose above target in the search range")

    grid = lo + fine_step * np.arange(int(round((hi - lo) / fine_step)) + 1)
    screened = {float(lo): None, float(hi): None}
    for g in grid[1:-1]:
        screened[float(g)] = sim(float(g), coarse_trials, True)
    # first fine point at or below the target (the bracket end qualifies)
    above = lo
    for g in grid[1:]:
        val = screened.get(float(g))
        if float(g) == hi or (val is not None and val <= target):
            below = float(g)
            break
        above = float(g)

    def fine(s):
        return sim(s, fine_trials, False)

    b_hi, b_lo = fine(above), fine(below)
    # fine statistics can disagree with the screening; walk outwards until bracketed
    for _ in range(max_steps):
        if b_hi <= target:
            below, b_lo = above, b_hi
            above -= fine_step
            b_hi = fine(above)
        elif b_lo > target:
            above, b_hi = below, b_lo
            below += fine_step
            b_lo = fine(below)
        else:
            break
    if b_lo <= 0.0:
        # no errors at the lower point: interpolate towards one error
        b_lo = 0.5 / fine_trials
    y0, y1 = math.log10(b_hi), math.log10(b_lo)
    frac = (math.log10(target) - y0) / (y1 - y0)
    return Crossing(above + frac * (below - above), tuple(points))
