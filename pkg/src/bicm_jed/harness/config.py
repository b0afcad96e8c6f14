"""Run configuration: a JSON object with defaults for every field.

Example (all keys optional)::

    {
      "code": {"type": "polar", "block_len": 48, "crc_len": 11, "list_size": 8},
      "layout": {"n_prb": 4, "n_ofdm_symbols": 1, "dmrs_positions": [1, 4, 7, 10]},
      "beta": 1.0,
      "n_tx": 1,
      "n_rx": 4,
      "channel": {"mode": "NonCoherentSimo", "alpha": 1.0},
      "receiver": {"family": "NonCoherentSimoJed", "llr_form": "MaxLog", "nd_window": 4},
      "snr_db_grid": [-2.0, -1.0, 0.0],
      "trials_per_point": 10000,
      "seed": 1,
      "early_stop_errors": 100
    }
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace

from ..channel import SIMO, canonical_mode
from ..coding.crc import CRC_POLYNOMIALS
from ..detector import FAMILIES, ReceiverSpec
from ..errors import ConfigError
from ..modem import DEFAULT_DMRS_POSITIONS, GridLayout

CODE_TYPES = ("polar", "ldpc")
DEFAULT_CRC = {"polar": 11, "ldpc": 16}


@dataclass(frozen=True)
class CodeConfig:
    type: str = "polar"
    block_len: int = 48  # B: message plus CRC
    crc_len: int | None = None  # None picks the per-code default
    list_size: int = 8
    bp_iters: int = 30
    ldpc_matrix: str | None = None  # alist path; None uses the shipped matrix

    def __post_init__(self):
        if self.type not in CODE_TYPES:
            raise ConfigError(f"code.type must be one of {CODE_TYPES}, got {self.type!r}")
        if self.crc_len is None:
            object.__setattr__(self, "crc_len", DEFAULT_CRC[self.type])
        if self.crc_len not in CRC_POLYNOMIALS:
            raise ConfigError(f"code.crc_len must be one of {sorted(CRC_POLYNOMIALS)}")
        if self.block_len <= self.crc_len:
            raise ConfigError("code.block_len must exceed the CRC length")
        if self.bp_iters < 1:
            raise ConfigError("code.bp_iters must be at least 1")

    @property
    def payload_len(self) -> int:
        return self.block_len - self.crc_len


@dataclass(frozen=True)
class ChannelConfig:
    mode: str = SIMO
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mode", canonical_mode(self.mode))
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"channel.alpha must be in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class ReceiverConfig:
    family: str = "NonCoherentSimoJed"
    llr_form: str = "MaxLog"
    nd_window: int | None = None
    alpha: float | None = None  # None follows channel.alpha
    diffuse_gain: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"receiver.family must be one of {FAMILIES}, got {self.family!r}")


@dataclass(frozen=True)
class SimConfig:
    code: CodeConfig = field(default_factory=CodeConfig)
    layout: GridLayout = field(default_factory=GridLayout)
    beta: float = 1.0
    n_tx: int = 1
    n_rx: int = 4
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    snr_db_grid: tuple = (-2.0, -1.0, 0.0)
    trials_per_point: int = 10000
    seed: int = 1
    early_stop_errors: int | None = 100
    chunk_size: int = 250
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "snr_db_grid", tuple(float(s) for s in self.snr_db_grid))
        if self.n_tx < 1 or self.n_rx < 1:
            raise ConfigError("n_tx and n_rx must be positive")
        if not self.beta > 0:
            raise ConfigError("beta must be positive")
        if self.trials_per_point < 100:
            raise ConfigError("trials_per_point must be at least 100")
        if self.chunk_size < 1 or self.workers < 1:
            raise ConfigError("chunk_size and workers must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.early_stop_errors is not None and self.early_stop_errors < 1:
            raise ConfigError("early_stop_errors must be positive or null")
        if self.channel.mode == SIMO and self.n_tx != 1:
            raise ConfigError("the SIMO channel needs n_tx = 1")
        if self.code.type == "polar" and self.code.block_len > self.coded_bits:
            raise ConfigError(f"block of {self.code.block_len} bits does not fit E = {self.coded_bits}")
        spec = self.receiver_spec()
        spec.check_antennas(self.n_tx)
        self.layout.antenna_pilot_masks(self.n_tx)

    @property
    def coded_bits(self) -> int:
        """E = 2 * n_data * n_tx for QPSK."""
        return self.layout.coded_bits(self.n_tx)

    def receiver_spec(self) -> ReceiverSpec:
        r = self.receiver
        alpha = self.channel.alpha if r.alpha is None else r.alpha
        return ReceiverSpec(r.family, r.llr_form, r.nd_window, float(alpha), float(r.diffuse_gain))

    # -- (de)serialisation --------------------------------------------------

    def to_dict(self) -> dict:
        d = asdict(self)
        d["layout"] = {
            "n_prb": self.layout.n_prb,
            "n_ofdm_symbols": self.layout.n_ofdm_symbols,
            "dmrs_positions": list(self.layout.dmrs_positions),
        }
        d["snr_db_grid"] = list(self.snr_db_grid)
        d["receiver"]["nd_window"] = self.receiver_spec().n_d_window
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        try:
            sub = {
                "code": CodeConfig,
                "channel": ChannelConfig,
                "receiver": ReceiverConfig,
            }
            for key, kind in sub.items():
                if key in data:
                    data[key] = kind(**_known(kind, data[key], key))
            if "layout" in data:
                lay = dict(data["layout"])
                lay.setdefault("dmrs_positions", DEFAULT_DMRS_POSITIONS)
                lay["dmrs_positions"] = tuple(lay["dmrs_positions"])
                data["layout"] = GridLayout(**_known(GridLayout, lay, "layout"))
            return cls(**_known(cls, data, "config"))
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "SimConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON form."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def with_(self, **changes) -> "SimConfig":
        return replace(self, **changes)


def _known(kind, values: dict, where: str) -> dict:
    if not isinstance(values, dict):
        raise ConfigError(f"{where} must be a JSON object")
    names = {f.name for f in fields(kind)}
    extra = set(values) - names
    if extra:
        raise ConfigError(f"unknown {where} field(s): {sorted(extra)}")
    return values
