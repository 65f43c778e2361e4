"""Observed RK4 convergence order of the vehicle dynamics on a spinning trajectory.

Usage: ``python3 scripts/rk4_convergence.py``
"""
from __future__ import annotations

import math

import numpy as np

from quadlink.config import parse_config
from quadlink.vehicle import RigidBodyState, rk4_step

T = 1.0
THRUSTS = np.array([1.3, 1.1, 0.9, 1.1, 1.4, 1.2])


def run(y0: np.ndarray, n: int, params) -> np.ndarray:
    y = y0.copy()
    for _ in range(n):
        y = rk4_step(y, THRUSTS, params, T / n)
    return y


def main() -> None:
    params = parse_config().vehicle
    y0 = RigidBodyState(
        eta=[0.1, -0.2, 0.3], v_b=[12.0, 1.0, 0.5], omega_b=[1.0, -0.5, 1.0], chi=-0.4, chi_dot=0.5
    ).to_array()
    ref = run(y0, 8192, params)
    prev = None
    print(f"{'steps':>6s} {'dt':>10s} {'max error':>12s} {'order':>6s}")
    for n in (8, 16, 32, 64, 128, 256):
        err = float(np.max(np.abs(run(y0, n, params) - ref)))
        order = f"{math.log2(prev / err):6.2f}" if prev else ""
        print(f"{n:6d} {T / n:10.5f} {err:12.4e} {order}")
        prev = err


if __name__ == "__main__":
    main()
