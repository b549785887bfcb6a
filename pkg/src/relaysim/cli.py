"""Experiment runner: JSON experiment specs in, CSV curves + manifest out.

Subcommands: ber, outage, diversity, snr-check, protocol, validate.
The CSV schema is fixed: snr_db,strategy,trials,errors,value,ci_low,ci_high
(value is BER or outage probability).  A JSON manifest echoing the spec,
seed, wall time, and package version is written next to the CSV.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from . import __version__
from .channel import SystemConfig, config_from_mean_snrs_db
from .montecarlo import (
    fit_diversity,
    run_ber,
    run_ber_points,
    run_outage,
    run_outage_points,
)
from .protocol import feedback_budget
from .receiver import closed_form_check
from .selection import STRATEGIES

EXIT_OK = 0
EXIT_BAD_SPEC = 2
EXIT_UNWRITABLE = 3

_MODES = ("ber", "outage", "diversity")
_AXES = ("transmit-snr-db", "mean-direct-snr-db")


# ---------------------------------------------------------------------------
# experiment spec handling
# ---------------------------------------------------------------------------

def load_spec(path: str) -> tuple[dict | None, list[str]]:
    """Parse an experiment spec file; returns (spec, diagnostics)."""
    try:
        with open(path) as f:
            spec = json.load(f)
    except OSError as exc:
        return None, [f"{path}: cannot read: {exc}"]
    except json.JSONDecodeError as exc:
        return None, [f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"]
    if not isinstance(spec, dict):
        return None, [f"{path}: top level must be a JSON object"]
    return spec, validate_spec(spec)


def validate_spec(spec: dict) -> list[str]:
    """Full structural and range validation; returns every violation found."""
    diags = []

    mode = spec.get("mode")
    if mode not in _MODES:
        diags.append(f"mode: must be one of {_MODES}, got {mode!r}")

    system = spec.get("system")
    if not isinstance(system, dict):
        diags.append("system: required object with n_s, n_r, n_d")
    else:
        for key in ("n_s", "n_r", "n_d"):
            v = system.get(key)
            if not isinstance(v, int) or v < 1:
                diags.append(f"system.{key}: must be an integer >= 1, got {v!r}")

    strategies = spec.get("strategies")
    if not isinstance(strategies, list) or not strategies:
        diags.append("strategies: required non-empty list")
    else:
        for s in strategies:
            if s not in STRATEGIES:
                diags.append(f"strategies: unknown strategy {s!r}; allowed: {list(STRATEGIES)}")

    sweep = spec.get("sweep")
    if not isinstance(sweep, dict):
        diags.append("sweep: required object with axis and values")
    else:
        axis = sweep.get("axis")
        if axis not in _AXES:
            diags.append(f"sweep.axis: must be one of {_AXES}, got {axis!r}")
        values = sweep.get("values")
        if not isinstance(values, list) or len(values) < 1 or \
                not all(isinstance(v, (int, float)) for v in values):
            diags.append("sweep.values: required list of numbers")
        elif any(b <= a for a, b in zip(values, values[1:])):
            diags.append("sweep.values: must be strictly increasing")
        for key in ("lambda_sd", "lambda_sr", "lambda_rd"):
            v = sweep.get(key)
            if v is not None and (not isinstance(v, (int, float)) or v <= 0):
                diags.append(f"sweep.{key}: must be a positive number, got {v!r}")
        ref = sweep.get("snr_reference", "per-pair")
        if ref not in ("per-pair", "aggregate"):
            diags.append(f"sweep.snr_reference: must be 'per-pair' or 'aggregate', got {ref!r}")

    trials = spec.get("trials")
    if not isinstance(trials, int) or trials < 1:
        diags.append(f"trials: must be an integer >= 1, got {trials!r}")

    seed = spec.get("seed", 0)
    if not isinstance(seed, int) or not (0 <= seed < 2**64):
        diags.append(f"seed: must be an unsigned 64-bit integer, got {seed!r}")

    if mode in ("outage", "diversity"):
        gamma0 = spec.get("gamma0")
        if not isinstance(gamma0, (int, float)) or gamma0 <= 0:
            diags.append(f"gamma0: must be a positive number for mode {mode!r}, got {gamma0!r}")

    es = spec.get("early_stop_errors")
    if es is not None and (not isinstance(es, int) or es < 1):
        diags.append(f"early_stop_errors: must be an integer >= 1 or null, got {es!r}")

    window = spec.get("fit_window")
    if window is not None:
        if (not isinstance(window, list) or len(window) != 2
                or not all(isinstance(v, (int, float)) and v > 0 for v in window)
                or window[0] >= window[1]):
            diags.append(f"fit_window: must be [low, high] with 0 < low < high, got {window!r}")

    return diags


def _sweep_points(spec: dict) -> list[tuple[float, SystemConfig]]:
    """Materialize (label_db, config) pairs for the spec's sweep axis."""
    system = spec["system"]
    sweep = spec["sweep"]
    values = [float(v) for v in sweep["values"]]
    ref = sweep.get("snr_reference", "per-pair")
    if sweep["axis"] == "transmit-snr-db":
        base = SystemConfig(
            n_s=system["n_s"], n_r=system["n_r"], n_d=system["n_d"],
            lambda_sd=float(sweep.get("lambda_sd", 1.0)),
            lambda_sr=float(sweep.get("lambda_sr", 1.0)),
            lambda_rd=float(sweep.get("lambda_rd", 1.0)),
        )
        return [(db, base.with_snr(10.0 ** (db / 10.0))) for db in values]
    relay_db = float(sweep.get("relay_mean_snr_db", 2.0))
    return [
        (db, config_from_mean_snrs_db(
            system["n_s"], system["n_r"], system["n_d"],
            sd_db=db, sr_db=relay_db, rd_db=relay_db, snr=1.0, reference=ref))
        for db in values
    ]


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_results(out_path: str, rows: list[dict], manifest: dict) -> None:
    with open(out_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["snr_db", "strategy", "trials", "errors", "value", "ci_low", "ci_high"])
        for r in rows:
            writer.writerow([
                _fmt(r["snr_db"]), r["strategy"], r["trials"], r["errors"],
                _fmt(r["value"]), _fmt(r["ci_low"]), _fmt(r["ci_high"]),
            ])
    with open(out_path + ".manifest.json", "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def _points_to_rows(points) -> list[dict]:
    return [
        {"snr_db": p.snr_db, "strategy": p.strategy, "trials": p.trials,
         "errors": p.errors, "value": p.value, "ci_low": p.ci_low, "ci_high": p.ci_high}
        for p in points
    ]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _resolve_threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("RELAYSIM_THREADS")
    if env is not None and env.isdigit():
        return max(1, int(env))
    return 1


def _run_experiment(args, mode: str) -> int:
    spec, diags = load_spec(args.config)
    if spec is not None and spec.get("mode") not in (None, mode):
        diags.append(f"mode: spec says {spec.get('mode')!r} but subcommand is {mode!r}")
    if diags:
        for d in diags:
            print(d, file=sys.stderr)
        return EXIT_BAD_SPEC

    seed = args.seed if args.seed is not None else int(spec.get("seed", 0))
    trials = args.trials if args.trials is not None else spec["trials"]
    threads = _resolve_threads(args)
    out_path = args.out or f"{mode}_results.csv"
    early = spec.get("early_stop_errors")
    points = _sweep_points(spec)

    t0 = time.monotonic()
    rows = []
    fits = {}
    for strategy in spec["strategies"]:
        if mode == "ber":
            res = run_ber_points(points, strategy, trials, seed, threads, early)
        else:
            res = run_outage_points(points, strategy, float(spec["gamma0"]), trials,
                                    seed, threads, early)
        rows.extend(_points_to_rows(res))
        if mode == "diversity":
            window = spec.get("fit_window")
            fit = fit_diversity(res, tuple(window) if window else None)
            fits[strategy] = {
                "local_slopes": [float(s) for s in fit.local_slopes],
                "ls_slope": fit.ls_slope,
                "order_estimate": fit.order_estimate,
            }
            print(f"{strategy}: ls_slope={fit.ls_slope:.3f} "
                  f"local={['%.3f' % s for s in fit.local_slopes]}")
    wall = time.monotonic() - t0

    manifest = {
        "spec": spec,
        "seed": seed,
        "trials": trials,
        "threads": threads,
        "wall_time_s": round(wall, 3),
        "version": __version__,
        "csv": os.path.basename(out_path),
    }
    if fits:
        manifest["diversity_fits"] = fits
    try:
        _write_results(out_path, rows, manifest)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_UNWRITABLE
    print(f"wrote {out_path} ({len(rows)} rows, {wall:.1f}s)")
    return EXIT_OK


def _cmd_snr_check(args) -> int:
    """Closed-form vs numerical post-SNR deviation sweep."""
    worst_mmse = 0.0
    worst_mrc = 0.0
    stream = 0
    for snr in (0.01, 1.0, 100.0):
        for n in (1, 2, 3, 4):
            e_mmse, e_mrc = closed_form_check(n, n, n, snr, args.trials, args.seed, stream)
            worst_mmse = max(worst_mmse, e_mmse)
            worst_mrc = max(worst_mrc, e_mrc)
            stream += 1
    print(f"max_rel_dev_mmse={worst_mmse:.3e} max_rel_dev_mrc={worst_mrc:.3e} tol=1e-09")
    return EXIT_OK if max(worst_mmse, worst_mrc) <= 1e-9 else 1


def _cmd_protocol(args) -> int:
    cfg = SystemConfig(n_s=args.ns, n_r=args.nr, n_d=args.nd)
    b = feedback_budget(cfg)
    print(f"feedback_bits={b.total_feedback_bits} "
          f"estimation_slots={b.snr_estimation_slots} training_slots={b.training_slots}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    spec, diags = load_spec(args.config)
    if diags:
        for d in diags:
            print(d)
        return EXIT_BAD_SPEC
    print("ok")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relaysim",
                                     description="MIMO relay antenna-selection simulator")
    parser.add_argument("--version", action="version", version=f"relaysim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="experiment spec (JSON)")
        p.add_argument("--seed", type=int, default=None, help="override spec seed")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (no effect on results)")
        p.add_argument("--trials", type=int, default=None, help="override trials per point")
        return p

    add_run("ber", "bit error rate sweep")
    add_run("outage", "outage probability sweep")
    add_run("diversity", "outage sweep plus log-log slope fit")

    p = sub.add_parser("snr-check", help="closed-form vs numerical post-SNR oracle check")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=1)

    p = sub.add_parser("protocol", help="training/feedback budget")
    p.add_argument("--ns", type=int, required=True)
    p.add_argument("--nr", type=int, required=True)
    p.add_argument("--nd", type=int, default=1)

    p = sub.add_parser("validate", help="validate an experiment spec without running")
    p.add_argument("--config", required=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in _MODES:
        return _run_experiment(args, args.command)
    if args.command == "snr-check":
        return _cmd_snr_check(args)
    if args.command == "protocol":
        return _cmd_protocol(args)
    return _cmd_validate(args)


if __name__ == "__main__":
    sys.exit(main())
