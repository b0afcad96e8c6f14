"""Command-line entry point: ``bicm-jed simulate`` and ``bicm-jed bench``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ._backend import backend_name
from .errors import ConfigError
from .harness import SimConfig, run_sweep
from .harness.bench import DEFAULT_LENGTHS, SETUPS, VARIANTS, bench_metrics, write_bench_csv

EXIT_CONFIG = 2


def parse_snr_range(text: str) -> tuple:
    """``lo:step:hi`` (inclusive) or a single value."""
    parts = text.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"bad SNR range {text!r}") from exc
    if len(vals) == 1:
        return (vals[0],)
    if len(vals) != 3:
        raise ConfigError(f"SNR range must be lo:step:hi, got {text!r}")
    lo, step, hi = vals
    if step <= 0 or hi < lo:
        raise ConfigError(f"SNR range needs step > 0 and hi >= lo, got {text!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + k * step, 10) for k in range(n))


def parse_lengths(text: str) -> tuple:
    try:
        out = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"bad length list {text!r}") from exc
    if not out:
        raise ConfigError("empty length list")
    return out


def _simulate(args) -> int:
    cfg = SimConfig.load(args.config)
    changes = {}
    if args.snr is not None:
        changes["snr_db_grid"] = parse_snr_range(args.snr)
    if args.trials is not None:
        changes["trials_per_point"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.no_early_stop:
        changes["early_stop_errors"] = None
    if changes:
        cfg = SimConfig.from_dict({**cfg.to_dict(), **{k: list(v) if isinstance(v, tuple) else v for k, v in changes.items()}})
    spec = cfg.receiver_spec()
    print(
        f"# {spec.family} {spec.llr_form} Nd={spec.n_d_window} {cfg.n_rx}x{cfg.n_tx} "
        f"{cfg.channel.mode} alpha={cfg.channel.alpha} beta={cfg.beta} {cfg.code.type} backend={backend_name()}"
    )
    print("snr_db,trials,block_errors,bler")

    def show(p):
        print(f"{p.snr_db:g},{p.trials},{p.block_errors},{p.bler:.6g}", flush=True)

    try:
        run_sweep(cfg, out=args.out, progress=show)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _bench(args) -> int:
    lengths = parse_lengths(args.lengths)
    setups = tuple(args.setup) if args.setup else tuple(SETUPS)
    print("setup,variant,block_len,n_prb,reps,mean_ms")

    def show(r):
        print(f"{r.setup},{r.variant},{r.block_len},{r.n_prb},{r.reps},{r.mean_ms:.4f}", flush=True)

    rows = bench_metrics(lengths, setups, tuple(VARIANTS), args.reps, progress=show)
    if args.out:
        write_bench_csv(args.out, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bicm-jed", description="BICM joint estimation/detection link simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="BLER sweep from a JSON config")
    sim.add_argument("--config", required=True, help="path to the JSON config")
    sim.add_argument("--snr", help="SNR grid lo:step:hi in dB (overrides the config)")
    sim.add_argument("--trials", type=int, help="trials per SNR point")
    sim.add_argument("--seed", type=int, help="master seed")
    sim.add_argument("--workers", type=int, help="worker processes per point")
    sim.add_argument("--no-early-stop", action="store_true", help="run every trial at every point")
    sim.add_argument("--out", help="results CSV (a .meta.json sidecar is written next to it)")
    sim.set_defaults(func=_simulate)

    b = sub.add_parser("bench", help="demodulator timing across block lengths")
    b.add_argument("--lengths", default=",".join(map(str, DEFAULT_LENGTHS)), help="comma-separated coded-bit lengths")
    b.add_argument("--reps", type=int, default=1000, help="repetitions per cell")
    b.add_argument("--setup", action="append", choices=tuple(SETUPS), help="restrict to a setup (repeatable)")
    b.add_argument("--out", help="timings CSV")
    b.set_defaults(func=_bench)
    return ap


def _glue_negative_values(argv):
    # "--snr -3:1:0" would otherwise read the range as an option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--snr":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--snr={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
