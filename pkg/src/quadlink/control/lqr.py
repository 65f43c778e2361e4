"""Numerical linearization and an infinite-horizon LQR solver.

The Riccati solver takes the stable invariant subspace of the Hamiltonian
matrix from an ordered real Schur form, then polishes the result with a few
Newton (Kleinman) steps, each a single Lyapunov solve.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from ..errors import NonFinite, NotStabilizable

HURWITZ_MARGIN = 1e-9
CARE_RTOL = 1e-8


@dataclass
class LinearModel:
    A: np.ndarray
    B: np.ndarray
    x0: np.ndarray
    u0: np.ndarray

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.B.shape[1]


@dataclass
class LQRWeights:
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        self.R = np.atleast_2d(np.asarray(self.R, dtype=float))

    def validate(
        self, q_key: str = "Q", r_key: str = "R", n_states: int | None = None, n_inputs: int | None = None
    ) -> list[tuple[str, str]]:
        errors = []
        Q, R = self.Q, self.R
        if Q.shape[0] != Q.shape[1]:
            errors.append((q_key, f"must be square, got {Q.shape}"))
        elif n_states is not None and Q.shape[0] != n_states:
            errors.append((q_key, f"must be {n_states}x{n_states}, got {Q.shape}"))
        elif not np.all(np.isfinite(Q)) or not np.allclose(Q, Q.T):
            errors.append((q_key, "must be finite and symmetric"))
        elif np.min(np.linalg.eigvalsh(Q)) < -1e-12 * max(1.0, np.abs(Q).max()):
            errors.append((q_key, "must be positive semidefinite"))
        if R.shape[0] != R.shape[1]:
            errors.append((r_key, f"must be square, got {R.shape}"))
        elif n_inputs is not None and R.shape[0] != n_inputs:
            errors.append((r_key, f"must be {n_inputs}x{n_inputs}, got {R.shape}"))
        elif not np.all(np.isfinite(R)) or not np.allclose(R, R.T):
            errors.append((r_key, "must be finite and symmetric"))
        elif np.min(np.linalg.eigvalsh(R)) <= 0:
            errors.append((r_key, "must be positive definite"))
        return errors


def linearize(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x0,
    u0,
    rel_step: float = 1e-5,
    abs_step: float = 1e-5,
) -> LinearModel:
    """Central-difference Jacobians of ``xdot = f(x, u)`` at ``(x0, u0)``.

    Component ``i`` is perturbed by ``max(abs_step, rel_step * |z_i|)``.

    Raises
    ------
    NonFinite
        If any probe returns a non-finite derivative.
    """
    x0 = np.asarray(x0, dtype=float)
    u0 = np.asarray(u0, dtype=float)

    def jac(z0, call):
        cols = []
        for i in range(z0.size):
            h = max(abs_step, rel_step * abs(z0[i]))
            zp = z0.copy()
            zm = z0.copy()
            zp[i] += h
            zm[i] -= h
            fp = np.asarray(call(zp), dtype=float)
            fm = np.asarray(call(zm), dtype=float)
            if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
                raise NonFinite(f"non-finite derivative while perturbing component {i}")
            # divide by the step actually taken after rounding
            cols.append((fp - fm) / (zp[i] - zm[i]))
        return np.column_stack(cols)

    A = jac(x0, lambda x: f(x, u0))
    B = jac(u0, lambda u: f(x0, u))
    return LinearModel(A, B, x0.copy(), u0.copy())


def care_residual(A, B, Q, R, P) -> np.ndarray:
    return A.T @ P + P @ A - P @ B @ np.linalg.solve(R, B.T @ P) + Q


def is_hurwitz(A, margin: float = HURWITZ_MARGIN) -> bool:
    return bool(np.max(np.linalg.eigvals(A).real) < -margin)


def solve_care(A, B, Q, R, newton_steps: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Stabilizing solution of ``A'P + PA - PBR^-1B'P + Q = 0``.

    Returns
    -------
    P : ndarray
        Symmetric Riccati solution.
    K : ndarray
        Optimal gain ``R^-1 B' P``; ``u = -K x``.

    Raises
    ------
    NotStabilizable
        If no stabilizing solution meets the residual bound
        ``1e-8 * max(1, ||Q||_F)``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float).reshape(A.shape[0], -1)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    n = A.shape[0]
    if not all(np.all(np.isfinite(M)) for M in (A, B, Q, R)):
        raise NonFinite("CARE data contains non-finite entries")

    G = B @ np.linalg.solve(R, B.T)
    H = np.block([[A, -G], [-Q, -A.T]])
    try:
        T, Z, sdim = scipy.linalg.schur(H, output="real", sort="lhp")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NotStabilizable(f"Hamiltonian Schur form failed: {exc}") from exc
    if sdim != n:
        raise NotStabilizable(f"Hamiltonian has {sdim} stable eigenvalues, need {n}")
    U11, U21 = Z[:n, :n], Z[n:, :n]
    try:
        P = np.linalg.solve(U11.T, U21.T).T
    except np.linalg.LinAlgError as exc:
        raise NotStabilizable("stable invariant subspace is not a graph") from exc
    P = 0.5 * (P + P.T)

    tol = CARE_RTOL * max(1.0, np.linalg.norm(Q, "fro"))
    best = np.linalg.norm(care_residual(A, B, Q, R, P), "fro")
    for _ in range(newton_steps):
        if best < 1e-3 * tol:
            break
        K = np.linalg.solve(R, B.T @ P)
        Acl = A - B @ K
        if not is_hurwitz(Acl, 0.0):
            break
        P_new = scipy.linalg.solve_continuous_lyapunov(Acl.T, -(Q + K.T @ R @ K))
        P_new = 0.5 * (P_new + P_new.T)
        res = np.linalg.norm(care_residual(A, B, Q, R, P_new), "fro")
        if not res < best:
            break
        P, best = P_new, res

    K = np.linalg.solve(R, B.T @ P)
    if not np.all(np.isfinite(P)) or not best < tol:
        raise NotStabilizable(f"Riccati residual {best:.3g} exceeds {tol:.3g}")
    if not is_hurwitz(A - B @ K):
        raise NotStabilizable("closed loop is not strictly stable")
    return P, K


def lqr(model: LinearModel, weights: LQRWeights) -> np.ndarray:
    _, K = solve_care(model.A, model.B, weights.Q, weights.R)
    return K
