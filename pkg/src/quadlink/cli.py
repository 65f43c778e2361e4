"""Command-line entry point: ``quadlink {check,trim,gains,simulate}``.

Exit codes: 0 success, 1 usage or configuration error, 2 trim or synthesis
failure, 3 simulation divergence or missed convergence tolerances.
"""
from __future__ import annotations

import argparse
import dataclasses
import datetime
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import SimConfig, parse_config
from .errors import Diverged, ParseError, QuadlinkError, ValidationError
from .sim import LOG_COLUMNS, build_reference, report_for, run_simulation
from .trim import build_curve, speed_grid

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SYNTHESIS = 2
EXIT_SIMULATION = 3

TRIM_COLUMNS = ["v", "alpha", "chi", "f_f", "f_b", "residual", "rank"]
GAIN_ROWS, GAIN_COLS = 5, 9

log = logging.getLogger("quadlink")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# output helpers


def format_row(values) -> str:
    """Comma-joined, 17 significant digits, locale independent."""
    return ",".join("%.17g" % float(v) for v in values)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(format_row(row) + "\n")


def write_manifest(out_dir: Path, name: str, config: SimConfig, subcommand: str, outputs: list[Path]) -> Path:
    manifest = {
        "config_hash": config.digest(),
        "tool_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "subcommand": subcommand,
        "outputs": [
            {"path": p.name, "sha256": hashlib.sha256(p.read_bytes()).hexdigest()} for p in outputs
        ],
    }
    path = out_dir / f"{name}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def gain_header() -> list[str]:
    k = [f"K{i}_{j}" for i in range(GAIN_ROWS) for j in range(GAIN_COLS)]
    return ["t", "phase", "n_inputs", *k, *(f"x_ref{j}" for j in range(GAIN_COLS)), *(f"u_ref{i}" for i in range(GAIN_ROWS))]


def gain_row(entry) -> list[float]:
    K = np.zeros((GAIN_ROWS, GAIN_COLS))
    K[: entry.K.shape[0]] = entry.K
    u = np.zeros(GAIN_ROWS)
    u[: entry.u_ref.size] = entry.u_ref
    return [entry.t, int(entry.phase), entry.K.shape[0], *K.ravel(), *entry.x_ref, *u]


# --------------------------------------------------------------------------
# subcommands


def cmd_check(config: SimConfig, args) -> int:
    print(f"configuration OK (hash {config.digest()})")
    return EXIT_OK


def cmd_trim(config: SimConfig, args) -> int:
    from .sim import alpha_policy

    v_min = 0.0 if args.v_min is None else args.v_min
    v_max = config.schedule.v_cruise if args.v_max is None else args.v_max
    dv = config.plan.dv if args.dv is None else args.dv
    if not dv > 0:
        raise UsageError(f"--dv must be > 0, got {dv:g}")
    if not 0 <= v_min <= v_max:
        raise UsageError(f"need 0 <= v-min <= v-max, got [{v_min:g}, {v_max:g}]")
    curve = build_curve(speed_grid(v_min, v_max, dv), alpha_policy(config), config.vehicle, config.plan.rank_rtol)
    out = args.out / "trim.csv"
    write_csv(out, TRIM_COLUMNS, ([p.v, p.alpha, p.chi, p.f_f, p.f_b_sum, p.residual, p.rank] for p in curve.points))
    write_manifest(args.out, "trim", config, "trim", [out])
    print(f"wrote {len(curve)} trim points to {out}")
    return EXIT_OK


def cmd_gains(config: SimConfig, args) -> int:
    ref = build_reference(config)
    out = args.out / "gains.csv"
    write_csv(out, gain_header(), (gain_row(e) for e in ref.gains.entries))
    write_manifest(args.out, "gains", config, "gains", [out])
    print(f"wrote {len(ref.gains)} gain rows to {out}")
    return EXIT_OK


def cmd_simulate(config: SimConfig, args) -> int:
    if args.decimate is not None:
        if args.decimate < 1:
            raise UsageError(f"--decimate must be >= 1, got {args.decimate}")
        config = dataclasses.replace(
            config,
            sim=dataclasses.replace(config.sim, decimate=args.decimate),
            values={**config.values, "sim.decimate": args.decimate},
        )
    ref = build_reference(config)
    try:
        result = run_simulation(config, ref)
    except Diverged as exc:
        print(f"simulation diverged (last valid t={exc.t:.3f} s): {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except QuadlinkError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    out = args.out / "log.csv"
    write_csv(out, LOG_COLUMNS, (r.as_row() for r in result.records))
    report = report_for(result, config)
    summary = args.out / "summary.txt"
    summary.write_text(
        report.format() + f"\nsaturated steps {result.saturation_count}\n", encoding="utf-8"
    )
    write_manifest(args.out, "log", config, "simulate", [out, summary])
    print(report.format())
    print(f"wrote {len(result.records)} rows to {out} ({result.wall_time:.1f} s)")
    return EXIT_OK if report.ok else EXIT_SIMULATION


COMMANDS = {"check": cmd_check, "trim": cmd_trim, "gains": cmd_gains, "simulate": cmd_simulate}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="config file (defaults if omitted)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser = _Parser(prog="quadlink", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("check", parents=[common], help="validate the configuration")
    trim = sub.add_parser("trim", parents=[common], help="write the equilibrium curve")
    trim.add_argument("--v-min", type=float, default=None, help="lowest speed (m/s, default 0)")
    trim.add_argument("--v-max", type=float, default=None, help="highest speed (m/s, default the cruise speed)")
    trim.add_argument("--dv", type=float, default=None, help="speed step (m/s, default plan.dv)")
    sub.add_parser("gains", parents=[common], help="write the LQR gain schedule")
    simulate = sub.add_parser("simulate", parents=[common], help="run the transition simulation")
    simulate.add_argument("--decimate", type=int, default=None, help="log every N steps")
    return parser


def _setup_logging() -> None:
    level = os.environ.get("QUADLINK_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = parse_config(args.config)
    except (ParseError, ValidationError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](config, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadlinkError as exc:
        print(f"trim or synthesis failed: {exc}", file=sys.stderr)
        return EXIT_SYNTHESIS


if __name__ == "__main__":
    sys.exit(main())
