"""Control allocation: body wrench request to tilt reference and summed thrusts."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import AllocationError, NegativeThrust, NoConvergence, Singular
from ..vehicle import VehicleParams, effectiveness_matrix, effectiveness_matrix_dchi

ALLOC_TOL = 1e-9
MAX_ITER = 50
COND_LIMIT = 1e12


@dataclass
class Allocation:
    chi_ref: float
    f_plus: np.ndarray
    iterations: int = 0


def _solve(A: np.ndarray, b: np.ndarray, message: str) -> np.ndarray:
    # the SVD condition check only runs when the LU solve looks suspicious
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise Singular(message) from exc
    if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e6 * (1.0 + np.max(np.abs(b))):
        if np.linalg.cond(A) > COND_LIMIT:
            raise Singular(message)
    return x


def _check_sign(f_plus: np.ndarray, strict: bool) -> None:
    if strict and np.any(f_plus < 0):
        raise NegativeThrust(f"allocation needs negative summed thrust: {f_plus}")


def allocate_hover(f_z: float, tau, params: VehicleParams, f_x: float = 0.0, strict: bool = True) -> Allocation:
    """Hover mode: ``chi = 0`` and the x-force row is dropped."""
    if f_x != 0.0:
        raise AllocationError(f"hover allocation cannot produce f_x={f_x:g}")
    M = effectiveness_matrix(0.0, params)[1:]
    rhs = np.array([f_z, tau[0], tau[1], tau[2]], dtype=float)
    f_plus = _solve(M, rhs, "hover allocation matrix is singular")
    _check_sign(f_plus, strict)
    return Allocation(0.0, f_plus, 0)


def allocate_cruise(
    f_x: float, f_z: float, tau, params: VehicleParams, chi_hint: float, strict: bool = True, tol: float = ALLOC_TOL
) -> Allocation:
    """Newton solve of ``[f_x, f_z, tau] = M(chi) f_plus`` for ``(chi, f_plus)``."""
    w = np.array([f_x, f_z, tau[0], tau[1], tau[2]], dtype=float)
    if not np.all(np.isfinite(w)):
        raise AllocationError(f"non-finite wrench request {w}")
    chi = float(chi_hint)
    M = effectiveness_matrix(chi, params)
    f_plus = _solve(M.T @ M, M.T @ w, f"allocation matrix singular at chi={chi:.6g}")
    for it in range(1, MAX_ITER + 1):
        r = M @ f_plus - w
        if np.max(np.abs(r)) < tol:
            _check_sign(f_plus, strict)
            return Allocation(chi, f_plus, it - 1)
        Jac = np.empty((5, 5))
        Jac[:, 0] = effectiveness_matrix_dchi(chi, params) @ f_plus
        Jac[:, 1:] = M
        step = _solve(Jac, r, f"allocation Jacobian singular at chi={chi:.6g}")
        chi -= step[0]
        f_plus = f_plus - step[1:]
        chi = math.remainder(chi, 2 * math.pi)
        M = effectiveness_matrix(chi, params)
    raise NoConvergence(f"allocation did not converge in {MAX_ITER} iterations")


def allocate(
    f_x: float,
    f_z: float,
    tau,
    params: VehicleParams,
    chi_hint: float = 0.0,
    hover: bool = False,
    strict: bool = True,
) -> tuple[float, np.ndarray]:
    """Tilt reference and ``f_plus`` realizing the requested body wrench.

    Raises
    ------
    Singular
        Rank-deficient Jacobian or hover matrix.
    NoConvergence
        Newton budget exhausted.
    NegativeThrust
        Some ``f_plus`` component negative (only with ``strict``).
    AllocationError
        Hover mode asked for a nonzero x-force.
    """
    if hover:
        a = allocate_hover(f_z, tau, params, f_x=f_x, strict=strict)
    else:
        a = allocate_cruise(f_x, f_z, tau, params, chi_hint, strict=strict)
    return a.chi_ref, a.f_plus
