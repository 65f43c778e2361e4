"""Run the default hover-to-cruise transition and print per-phase error summaries.

Usage: ``python3 scripts/run_transition.py [--config FILE] [--csv OUT]``
"""
from __future__ import annotations

import argparse

import numpy as np

from quadlink.cli import format_row
from quadlink.config import parse_config
from quadlink.phases import Phase
from quadlink.sim import LOG_COLUMNS, build_reference, report_for, run_simulation


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=None)
    ap.add_argument("--csv", default=None, help="optional log output path")
    args = ap.parse_args()

    config = parse_config(args.config)
    result = run_simulation(config, build_reference(config))
    a = result.array()
    col = {n: i for i, n in enumerate(LOG_COLUMNS)}
    z_ref = config.schedule.z_ref
    print(f"{'phase':<13s} {'max|z-zref|':>12s} {'max|y|':>10s} {'max|th-a|':>10s} {'max|chi-nom|':>12s}")
    for ph in Phase:
        m = a[:, col["phase"]] == int(ph)
        if not np.any(m):
            continue
        rows = a[m]
        print(
            f"{ph.name.lower():<13s} {np.max(np.abs(rows[:, col['z']] - z_ref)):12.4g}"
            f" {np.max(np.abs(rows[:, col['y']])):10.3g}"
            f" {np.max(np.abs(rows[:, col['theta']] - rows[:, col['alpha_ref']])):10.3g}"
            f" {np.max(np.abs(rows[:, col['chi']] - rows[:, col['chi_nom']])):12.4g}"
        )
    print(f"saturations {result.saturation_count}, wall time {result.wall_time:.1f} s")
    print(report_for(result, config).format())
    if args.csv:
        with open(args.csv, "w", newline="\n") as fh:
            fh.write(",".join(LOG_COLUMNS) + "\n")
            for row in a:
                fh.write(format_row(row) + "\n")


if __name__ == "__main__":
    main()
