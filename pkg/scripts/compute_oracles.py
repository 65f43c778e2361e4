"""Recompute the frozen reference values in ``tests/oracles.json``.

Everything here is derived without importing ``quadlink``: the rotor
wrench is rebuilt from rotor positions and thrust directions with cross
products, trim tilts come from brute-force grid scans of a body-frame force
balance, and the Riccati case is solved in closed form.

Usage: ``python3 scripts/compute_oracles.py [--check]``
"""
from __future__ import annotations

import argparse
import json
import math
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "tests" / "oracles.json"

# default airframe and wing
M, G = 0.5, 9.81
LF = LFW = LB = LBW = 0.1
KAPPA = 0.02
RHO, S = 1.225, 0.2
CL = [0.2, 3.5, 0.0, -4.0]
CD = [0.02, 0.0, 0.9]


def poly(c, a):
    return sum(ci * a**i for i, ci in enumerate(c))


def rotor_columns(chi, kappa=KAPPA, lfw=LFW, lbw=LBW):
    """6 columns [force; torque] from positions, directions and drag torque."""
    d_front = np.array([-math.sin(chi), 0.0, -math.cos(chi)])
    d_rear = np.array([0.0, 0.0, -1.0])
    rotors = [
        ((LF, lfw, 0.0), d_front, +1),
        ((LF, lfw, 0.0), d_front, +1),
        ((LF, -lfw, 0.0), d_front, -1),
        ((LF, -lfw, 0.0), d_front, -1),
        ((-LB, lbw, 0.0), d_rear, -1),
        ((-LB, -lbw, 0.0), d_rear, +1),
    ]
    cols = []
    for r, d, spin in rotors:
        tau = np.cross(np.array(r), d) + spin * kappa * d
        cols.append(np.concatenate([d, tau]))
    return np.array(cols).T


def reduced_matrix(chi, **kw):
    """5x4 map from [f1+f2, f3+f4, f5, f6] to [fx, fz, tx, ty, tz]."""
    W = rotor_columns(chi, **kw)[[0, 2, 3, 4, 5]]
    return np.column_stack([W[:, 0], W[:, 2], W[:, 4], W[:, 5]])


def degeneracy_by_scan(**kw):
    """Tilt in (0, pi/2) minimizing the smallest singular value."""
    grid = np.linspace(1e-4, math.pi / 2 - 1e-4, 20001)
    smin = np.array([np.linalg.svd(reduced_matrix(c, **kw), compute_uv=False)[-1] for c in grid])
    i = int(np.argmin(smin))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    f = lambda c: np.linalg.svd(reduced_matrix(c, **kw), compute_uv=False)[-1]
    phi = (math.sqrt(5) - 1) / 2
    for _ in range(200):
        a, b = hi - phi * (hi - lo), lo + phi * (hi - lo)
        if f(a) < f(b):
            hi = b
        else:
            lo = a
    return 0.5 * (lo + hi), float(f(0.5 * (lo + hi)))


def torque_mismatch(v, alpha, chi):
    """Pitch torque left over after the two force equations fix f_f and f_b."""
    q = 0.5 * RHO * v * v * S
    L, D = q * poly(CL, alpha), q * poly(CD, alpha)
    ca, sa = math.cos(alpha), math.sin(alpha)
    aero = np.array([-ca * D + sa * L, -sa * D - ca * L])
    grav = np.array([-math.sin(alpha), math.cos(alpha)]) * M * G
    A = np.array([[-math.sin(chi), 0.0], [-math.cos(chi), -1.0]])
    f_f, f_b = np.linalg.solve(A, -(aero + grav))
    return LF * math.cos(chi) * f_f - LB * f_b, f_f, f_b


def chi_by_scan(v, alpha, step=1e-5):
    """First sign change of the torque mismatch scanning down from zero tilt."""
    grid = np.arange(-1e-6, -math.pi / 2 + 1e-3, -step)
    res = np.array([torque_mismatch(v, alpha, c)[0] for c in grid])
    flips = np.flatnonzero(np.sign(res[:-1]) != np.sign(res[1:]))
    if flips.size == 0:
        return None, step
    i = int(flips[0])
    a, b = grid[i], grid[i + 1]
    ra = res[i]
    for _ in range(200):
        c = 0.5 * (a + b)
        rc = torque_mismatch(v, alpha, c)[0]
        if np.sign(rc) == np.sign(ra):
            a, ra = c, rc
        else:
            b = c
    return 0.5 * (a + b), step


def lift_balance_alpha(v, fraction):
    q = 0.5 * RHO * v * v * S
    coeffs = [c * q for c in CL]
    coeffs[0] -= fraction * M * G
    roots = np.roots(coeffs[::-1])
    real = [r.real for r in roots if abs(r.imag) < 1e-12 and abs(r.real) <= 0.4]
    return float(min(real, key=abs))


def compute():
    out = {}
    chi_d, smin = degeneracy_by_scan()
    out["degenerate_tilt"] = chi_d
    out["degenerate_sigma_min"] = smin
    chi_d3, _ = degeneracy_by_scan(kappa=0.03)
    out["degenerate_tilt_kappa_0.03"] = chi_d3
    chi_20, step = chi_by_scan(20.0, 0.05)
    out["chi_v20_alpha0.05"] = chi_20
    out["chi_scan_step"] = step
    out["chi_v5_alpha0.1"] = chi_by_scan(5.0, 0.1)[0]
    out["chi_v10_alpha0.0"] = chi_by_scan(10.0, 0.0)[0]
    a_c = lift_balance_alpha(20.0, 0.8)
    out["alpha_cruise"] = a_c
    out["chi_cruise"] = chi_by_scan(20.0, a_c)[0]
    _, ff, fb = torque_mismatch(20.0, a_c, out["chi_cruise"])
    out["f_f_cruise"], out["f_b_cruise"] = float(ff), float(fb)
    out["chi_v0_alpha0.15"] = chi_by_scan(0.0, 0.15)[0]
    out["hover_f_f"] = out["hover_f_b"] = M * G / 2
    out["double_integrator_K"] = [1.0, math.sqrt(3.0)]
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare with the frozen file instead of writing")
    args = ap.parse_args()
    values = compute()
    if args.check:
        frozen = json.loads(OUT.read_text())
        for k, v in values.items():
            print(f"{k:28s} frozen={frozen.get(k)!r} now={v!r}")
        return
    OUT.write_text(json.dumps(values, indent=2, sort_keys=True) + "\n")
    print(json.dumps(values, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
