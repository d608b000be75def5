"""Command line front end.

Subcommands: sweep-snr, sweep-rate, coding-gain, diversity, simulate.
Curve commands emit CSV with the fixed header
``axis,exact,asymptotic,simulated,ci_low,ci_high,log10_exact`` (17
significant digits, empty cells where a column does not apply) and, with
--json, a JSON mirror carrying run metadata. dB inputs are converted to
linear SNR once, at parse time. Exit codes: 0 success, 2 usage or validation
error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .analysis import (
    asymptotic_outage,
    coding_gain,
    diversity_order,
    exact_outage,
)
from .errors import ConvergenceError, DomainError, UnsupportedConfigError
from .keyhole import SystemConfig
from .montecarlo import empirical_diversity_slope, simulate_outage

CSV_HEADER = ("axis", "exact", "asymptotic", "simulated", "ci_low", "ci_high",
              "log10_exact")

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class CurvePoint:
    axis: float
    exact: Optional[float] = None
    asymptotic: Optional[float] = None
    simulated: Optional[float] = None
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    log10_exact: Optional[float] = None


@dataclass(frozen=True)
class CurveResult:
    axis_name: str
    points: tuple


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def parse_range(text: str) -> list:
    """start:step:stop, stop included when it lands on the grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected start:step:stop, got {text!r}")
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError:
        raise ValueError(f"non-numeric range {text!r}") from None
    if not all(math.isfinite(v) for v in (start, step, stop)):
        raise ValueError(f"range bounds must be finite: {text!r}")
    if step <= 0.0:
        raise ValueError(f"range step must be > 0: {text!r}")
    if stop < start:
        raise ValueError(f"range stop is below start: {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def parse_gamma_db(text: str, k_rounds: int) -> tuple:
    """Scalar dB value, or one comma-separated dB value per round."""
    vals = [float(p) for p in text.split(",")]
    if len(vals) == 1:
        vals = vals * k_rounds
    if len(vals) != k_rounds:
        raise ValueError(
            f"--gamma-db has {len(vals)} entries for {k_rounds} rounds"
        )
    return tuple(db_to_linear(v) for v in vals)


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.17g}"


def write_curve_csv(path, curve: CurveResult) -> None:
    if path is None:
        _write_csv_rows(sys.stdout, curve)
        return
    with open(path, "w", newline="") as fh:
        _write_csv_rows(fh, curve)


def _write_csv_rows(fh, curve: CurveResult) -> None:
    w = csv.writer(fh)
    w.writerow(CSV_HEADER)
    for p in curve.points:
        w.writerow([_fmt(p.axis), _fmt(p.exact), _fmt(p.asymptotic),
                    _fmt(p.simulated), _fmt(p.ci_low), _fmt(p.ci_high),
                    _fmt(p.log10_exact)])


def read_curve_csv(path, axis_name: str = "axis") -> CurveResult:
    """Parse a file produced by ``write_curve_csv``.

    The fixed CSV header cannot carry the axis name, so it is supplied by
    the caller (the JSON mirror records it in metadata).
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"unexpected header in {path}: {rows[:1]!r}")
    points = []
    for row in rows[1:]:
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"malformed row {row!r}")
        vals = [None if cell == "" else float(cell) for cell in row]
        points.append(CurvePoint(*vals))
    return CurveResult(axis_name=axis_name, points=tuple(points))


def write_curve_json(path, curve: CurveResult, metadata: dict) -> None:
    doc = {
        "metadata": dict(metadata, axis_name=curve.axis_name,
                         tool_version=__version__),
        "points": [asdict(p) for p in curve.points],
    }
    if path is None:
        json.dump(doc, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def _config_metadata(config: SystemConfig) -> dict:
    return {
        "n_t": config.n_t,
        "n_r": config.n_r,
        "k_rounds": config.k_rounds,
        "rate": config.rate,
        "snr_per_round": list(config.snr_per_round),
    }


def _sim_columns(config: SystemConfig, trials: int, seed: int, lanes: int):
    r = simulate_outage(config, trials, seed=seed, lanes=lanes)
    lo = max(r.estimate - r.ci_halfwidth, 0.0)
    hi = min(r.estimate + r.ci_halfwidth, 1.0)
    return r.estimate, lo, hi


def _curve_point(config: SystemConfig, axis: float, trials: int, seed: int,
                 lanes: int) -> CurvePoint:
    ex = exact_outage(config)
    try:
        asy = asymptotic_outage(config).value
    except DomainError:
        asy = None
    sim = lo = hi = None
    if trials > 0:
        sim, lo, hi = _sim_columns(config, trials, seed, lanes)
    return CurvePoint(axis=axis, exact=ex.value, asymptotic=asy,
                      simulated=sim, ci_low=lo, ci_high=hi,
                      log10_exact=ex.log_value / _LN10)


def _emit_curve(args, curve: CurveResult, metadata: dict) -> int:
    if args.json and args.out is None:
        print("--json needs --out to place the mirror", file=sys.stderr)
        return 2
    write_curve_csv(args.out, curve)
    if args.json:
        write_curve_json(Path(args.out).with_suffix(".json"), curve, metadata)
    return 0


def _cmd_sweep_snr(args) -> int:
    axis = parse_range(args.snr_db)
    points = []
    for db in axis:
        config = SystemConfig.equal_snr(args.nt, args.nr, args.k, args.rate,
                                        db_to_linear(db))
        points.append(_curve_point(config, db, args.trials, args.seed,
                                   args.lanes))
    curve = CurveResult(axis_name="snr_db", points=tuple(points))
    meta = {
        "command": "sweep-snr",
        "n_t": args.nt, "n_r": args.nr, "k_rounds": args.k,
        "rate": args.rate, "snr_db": args.snr_db,
        "trials": args.trials, "seed": args.seed, "lanes": args.lanes,
    }
    return _emit_curve(args, curve, meta)


def _cmd_sweep_rate(args) -> int:
    axis = parse_range(args.rate)
    snrs = parse_gamma_db(args.gamma_db, args.k)
    points = []
    for rate in axis:
        config = SystemConfig(args.nt, args.nr, args.k, rate, snrs)
        points.append(_curve_point(config, rate, args.trials, args.seed,
                                   args.lanes))
    curve = CurveResult(axis_name="rate", points=tuple(points))
    meta = {
        "command": "sweep-rate",
        "n_t": args.nt, "n_r": args.nr, "k_rounds": args.k,
        "gamma_db": args.gamma_db, "rate": args.rate,
        "trials": args.trials, "seed": args.seed, "lanes": args.lanes,
    }
    return _emit_curve(args, curve, meta)


def _cmd_coding_gain(args) -> int:
    axis = parse_range(args.rate)
    points = []
    for rate in axis:
        config = SystemConfig.equal_snr(args.nt, args.nr, 1, rate, 1.0)
        c = coding_gain(config)
        points.append(CurvePoint(axis=rate, exact=c,
                                 log10_exact=math.log10(c)))
    curve = CurveResult(axis_name="rate", points=tuple(points))
    meta = {
        "command": "coding-gain",
        "n_t": args.nt, "n_r": args.nr, "rate": args.rate,
    }
    return _emit_curve(args, curve, meta)


def _cmd_diversity(args) -> int:
    grid = parse_range(args.snr_db)
    config = SystemConfig.equal_snr(args.nt, args.nr, args.k, args.rate,
                                    db_to_linear(grid[0]))
    d = diversity_order(config)
    fitted = empirical_diversity_slope(
        config, grid, method=args.method, trials=args.trials,
        seed=args.seed, lanes=args.lanes,
    )
    gap = abs(fitted - d) / d
    doc = {
        "analytic_diversity_order": d,
        "fitted_slope": fitted,
        "relative_gap": gap,
        "metadata": {
            "command": "diversity", "method": args.method,
            "n_t": args.nt, "n_r": args.nr, "k_rounds": args.k,
            "rate": args.rate, "snr_db": args.snr_db,
            "trials": args.trials if args.method == "simulation" else None,
            "seed": args.seed, "lanes": args.lanes,
            "tool_version": __version__,
        },
    }
    if args.json:
        out = json.dumps(doc, indent=2)
    else:
        out = (
            f"analytic diversity order: {d}\n"
            f"fitted slope ({args.method}, {grid[0]:g}-{grid[-1]:g} dB, "
            f"{len(grid)} points): {fitted:.6g}\n"
            f"relative gap: {100.0 * gap:.3g}%"
        )
    if args.out:
        Path(args.out).write_text(out + "\n")
    else:
        print(out)
    return 0


def _cmd_simulate(args) -> int:
    snrs = parse_gamma_db(args.gamma_db, args.k)
    config = SystemConfig(args.nt, args.nr, args.k, args.rate, snrs)
    r = simulate_outage(config, args.trials, seed=args.seed, lanes=args.lanes)
    doc = {
        "trials": r.trials,
        "failures": r.failures,
        "estimate": r.estimate,
        "ci_halfwidth": r.ci_halfwidth,
        "low_confidence": r.low_confidence,
        "metadata": {
            "command": "simulate",
            "config": _config_metadata(config),
            "seed": r.seed, "lanes": args.lanes,
            "tool_version": __version__,
        },
    }
    if args.json:
        out = json.dumps(doc, indent=2)
    else:
        out = (
            f"trials: {r.trials}\n"
            f"failures: {r.failures}\n"
            f"estimate: {r.estimate:.17g}\n"
            f"ci_halfwidth_3sigma: {r.ci_halfwidth:.17g}\n"
            f"low_confidence: {'yes' if r.low_confidence else 'no'}"
        )
    if args.out:
        Path(args.out).write_text(out + "\n")
    else:
        print(out)
    return 0


def _add_antenna_flags(p, k_default=3):
    p.add_argument("--nt", type=int, default=2, help="transmit antennas")
    p.add_argument("--nr", type=int, default=2, help="receive antennas")
    p.add_argument("--k", type=int, default=k_default, help="HARQ rounds")


def _add_run_flags(p, trials_default):
    p.add_argument("--trials", type=int, default=trials_default,
                   help="Monte Carlo trials per point (0 disables)")
    p.add_argument("--seed", type=int, default=1, help="simulation seed")
    p.add_argument("--lanes", type=int, default=os.cpu_count() or 1,
                   help="parallel lanes (does not affect results)")


def _add_out_flags(p):
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--json", action="store_true",
                   help="also write a JSON mirror with metadata")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="keyhole-harq",
        description="Outage probability of Type-I HARQ over keyhole MIMO channels",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-snr", help="outage vs SNR at fixed rate")
    _add_antenna_flags(p)
    p.add_argument("--rate", type=float, default=3.0, help="target rate, bits/s/Hz")
    p.add_argument("--snr-db", default="0:2:30",
                   help="axis range start:step:stop in dB")
    _add_run_flags(p, trials_default=0)
    _add_out_flags(p)
    p.set_defaults(func=_cmd_sweep_snr)

    p = sub.add_parser("sweep-rate", help="outage vs rate at fixed SNR")
    _add_antenna_flags(p)
    p.add_argument("--rate", default="0.5:0.25:6",
                   help="axis range start:step:stop in bits/s/Hz")
    p.add_argument("--gamma-db", default="5",
                   help="operating SNR in dB (comma list = per round)")
    _add_run_flags(p, trials_default=0)
    _add_out_flags(p)
    p.set_defaults(func=_cmd_sweep_rate)

    p = sub.add_parser("coding-gain", help="asymptote SNR scale C(R) vs rate")
    p.add_argument("--nt", type=int, default=2, help="transmit antennas")
    p.add_argument("--nr", type=int, default=2, help="receive antennas")
    p.add_argument("--rate", default="0.5:0.25:6",
                   help="axis range start:step:stop in bits/s/Hz")
    _add_out_flags(p)
    p.set_defaults(func=_cmd_coding_gain)

    p = sub.add_parser("diversity", help="fitted log-log slope vs analytic order")
    _add_antenna_flags(p)
    p.add_argument("--rate", type=float, default=3.0, help="target rate, bits/s/Hz")
    p.add_argument("--snr-db", default="50:2:60",
                   help="fit grid start:step:stop in dB")
    p.add_argument("--method", choices=("exact", "simulation"), default="exact")
    _add_run_flags(p, trials_default=10**6)
    _add_out_flags(p)
    p.set_defaults(func=_cmd_diversity)

    p = sub.add_parser("simulate", help="Monte Carlo outage estimate at one point")
    _add_antenna_flags(p)
    p.add_argument("--rate", type=float, default=3.0, help="target rate, bits/s/Hz")
    p.add_argument("--gamma-db", default="10",
                   help="operating SNR in dB (comma list = per round)")
    _add_run_flags(p, trials_default=10**6)
    _add_out_flags(p)
    p.set_defaults(func=_cmd_simulate)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, UnsupportedConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    raise SystemExit(main())
