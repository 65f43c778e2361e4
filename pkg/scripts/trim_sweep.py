"""Print the equilibrium curve and the tilt at which the effectiveness matrix loses rank.

Usage: ``python3 scripts/trim_sweep.py [--config FILE] [--dv STEP]``
"""
from __future__ import annotations

import argparse
import math

from quadlink.config import parse_config
from quadlink.sim import alpha_policy
from quadlink.trim import build_curve, degenerate_tilt, rank_check, speed_grid


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=None)
    ap.add_argument("--dv", type=float, default=2.0)
    args = ap.parse_args()

    config = parse_config(args.config)
    p = config.vehicle
    curve = build_curve(speed_grid(0.0, config.schedule.v_cruise, args.dv), alpha_policy(config), p)
    print(f"{'v':>6s} {'alpha':>9s} {'chi':>9s} {'f_f':>8s} {'f_b':>8s} {'rank':>4s}")
    for e in curve.points:
        print(f"{e.v:6.2f} {e.alpha:9.5f} {e.chi:9.5f} {e.f_f:8.4f} {e.f_b_sum:8.4f} {e.rank:4d}")

    chi_d = degenerate_tilt(p)
    naive = math.atan(p.kappa / p.l_fw)
    print(f"rank-3 tilt {chi_d:.6f} rad: rank {rank_check(chi_d, p)[0]}")
    print(f"atan(kappa/l_fw) = {naive:.6f} rad: rank {rank_check(naive, p)[0]}")


if __name__ == "__main__":
    main()
