"""Cruise equilibria, controllability rank, and the hover-to-cruise reference plan.

A level cruise at stability-frame speed ``v`` with pitch equal to the angle
of attack ``alpha`` is an equilibrium when front thrust ``f_f`` (rotors 1-4),
rear thrust ``f_b`` (rotors 5-6) and the tilt ``chi`` satisfy, in the
stability frame,

    -D - f_f sin(alpha + chi) - f_b sin(alpha) = 0
    m g - L - f_f cos(alpha + chi) - f_b cos(alpha) = 0
    f_f l_f cos(chi) - f_b l_b = 0

Eliminating the thrusts leaves one scalar condition in ``(v, alpha, chi)``
(:func:`equilibrium_residual`), which is solved for ``chi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import Infeasible, NoRoot, RankDeficient, ScheduleError
from .phases import Phase, PhaseSchedule, phase_at
from .vehicle import RigidBodyState, VehicleParams, effectiveness_matrix, lift_drag

CHI_LO = -math.pi / 2 + 1e-3
CHI_HI = -1e-6
RANK_RTOL = 1e-10


def equilibrium_residual(v: float, alpha: float, chi: float, params: VehicleParams) -> float:
    L, D = lift_drag(v, alpha, params.aero)
    k = params.l_f / params.l_b * math.cos(chi)
    return (params.weight - L) * (math.sin(alpha + chi) + k * math.sin(alpha)) + D * (
        math.cos(alpha + chi) + k * math.cos(alpha)
    )


def rank_check(chi: float, params: VehicleParams, rtol: float = RANK_RTOL) -> tuple[int, bool]:
    """Numerical rank of ``M(chi)`` with singular-value cutoff ``sigma_max * rtol``."""
    s = np.linalg.svd(effectiveness_matrix(chi, params), compute_uv=False)
    rank = int(np.sum(s > s[0] * rtol))
    return rank, rank == 4


def degenerate_tilt(params: VehicleParams) -> float:
    """Tilt angle in (-pi/2, pi/2] at which ``M(chi)`` loses rank.

    The sum coordinates (f1+f2, f5+f6) always span the f_x, f_z, tau_y rows;
    the difference coordinates reach tau_x and tau_z through a 2x2 block whose
    determinant is ``sin(chi) (l_fw l_bw - kappa^2) - kappa cos(chi) (l_fw + l_bw)``.
    """
    k = params.kappa
    den = params.l_fw * params.l_bw - k * k
    if den == 0:
        return math.pi / 2
    return math.atan(k * (params.l_fw + params.l_bw) / den)


def solve_chi(
    v: float,
    alpha: float,
    params: VehicleParams,
    check_rank: bool = True,
    n_scan: int = 400,
    rank_rtol: float = RANK_RTOL,
) -> float:
    """Tilt angle putting ``(v, alpha)`` in equilibrium.

    The root nearest to zero tilt inside ``[-pi/2 + 1e-3, -1e-6]`` is refined
    with Brent's method.  The pure hover point ``v = alpha = 0`` returns 0.
    """
    if v == 0.0 and alpha == 0.0:
        chi = 0.0
    else:
        grid = np.linspace(CHI_HI, CHI_LO, n_scan)
        res = np.array([equilibrium_residual(v, alpha, c, params) for c in grid])
        chi = None
        for i in range(n_scan - 1):
            if res[i] == 0.0:
                chi = float(grid[i])
                break
            if res[i] * res[i + 1] < 0:
                chi = brentq(
                    lambda c: equilibrium_residual(v, alpha, c, params),
                    grid[i + 1],
                    grid[i],
                    xtol=1e-15,
                    rtol=1e-15,
                    maxiter=500,
                )
                break
        if chi is None:
            raise NoRoot(f"no equilibrium tilt for v={v:g} m/s, alpha={alpha:g} rad")
    if check_rank:
        rank, ok = rank_check(chi, params, rank_rtol)
        if not ok:
            raise RankDeficient(f"equilibrium tilt {chi:.6g} rad gives rank {rank}")
    return chi


def trim_equations(v: float, alpha: float, chi: float, params: VehicleParams) -> tuple[np.ndarray, np.ndarray]:
    """Linear system ``A @ [f_f, f_b] = b`` of the three balance equations."""
    L, D = lift_drag(v, alpha, params.aero)
    A = np.array(
        [
            [math.sin(alpha + chi), math.sin(alpha)],
            [math.cos(alpha + chi), math.cos(alpha)],
            [params.l_f * math.cos(chi), -params.l_b],
        ]
    )
    b = np.array([-D, params.weight - L, 0.0])
    return A, b


def trim_thrusts(v: float, alpha: float, chi: float, params: VehicleParams) -> tuple[float, float]:
    """Total front and rear thrust ``(f_f, f_b)`` holding the equilibrium."""
    A, b = trim_equations(v, alpha, chi, params)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    f_f, f_b = float(sol[0]), float(sol[1])
    if f_f < 0 or f_b < 0:
        raise Infeasible(f"trim needs negative thrust at v={v:g}, alpha={alpha:g}, chi={chi:g}: f_f={f_f:.4g}, f_b={f_b:.4g}")
    return f_f, f_b


def trim_rotor_thrusts(f_f: float, f_b: float) -> np.ndarray:
    return np.array([f_f / 4, f_f / 4, f_f / 4, f_f / 4, f_b / 2, f_b / 2])


def trim_state(v: float, alpha: float, chi: float, z: float = 0.0) -> RigidBodyState:
    return RigidBodyState(
        x_w=[0.0, 0.0, z],
        eta=[0.0, alpha, 0.0],
        v_b=[v * math.cos(alpha), 0.0, v * math.sin(alpha)],
        chi=chi,
    )


# --------------------------------------------------------------------------
# angle-of-attack schedule and equilibrium curve


def lift_balance_alpha(v: float, params: VehicleParams, lift_fraction: float = 0.8, bound: float = 0.4) -> float:
    """Angle of attack whose lift at speed ``v`` carries ``lift_fraction`` of the weight."""
    target = lift_fraction * params.weight

    def f(a):
        return lift_drag(v, a, params.aero)[0] - target

    try:
        return brentq(f, -bound, bound, xtol=1e-14)
    except ValueError as exc:
        raise NoRoot(f"lift {target:.4g} N unreachable at v={v:g} m/s for |alpha| <= {bound}") from exc


@dataclass(frozen=True)
class AlphaSchedule:
    """Piecewise-linear angle of attack versus speed.

    Ramps from ``alpha_start`` at v = 0 to ``alpha_cruise`` at ``v_knee``
    and holds beyond.
    """

    alpha_start: float
    alpha_cruise: float
    v_knee: float

    def __call__(self, v: float) -> float:
        if self.v_knee <= 0 or v >= self.v_knee:
            return self.alpha_cruise
        s = max(v, 0.0) / self.v_knee
        return self.alpha_start + s * (self.alpha_cruise - self.alpha_start)

    def slope(self, v: float) -> float:
        """Right derivative d(alpha)/dv."""
        if self.v_knee <= 0 or v >= self.v_knee:
            return 0.0
        return (self.alpha_cruise - self.alpha_start) / self.v_knee


@dataclass(frozen=True)
class EquilibriumPoint:
    v: float
    alpha: float
    chi: float
    f_f: float
    f_b_sum: float
    residual: float
    rank: int


@dataclass
class EquilibriumCurve:
    points: list[EquilibriumPoint]
    alpha_of_v: Callable[[float], float]

    def __len__(self):
        return len(self.points)

    @property
    def start(self) -> EquilibriumPoint:
        return self.points[0]

    @property
    def end(self) -> EquilibriumPoint:
        return self.points[-1]

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: np.array([getattr(p, name) for p in self.points]) for name in EquilibriumPoint.__dataclass_fields__}


def _as_alpha_policy(alpha_of_v) -> Callable[[float], float]:
    if callable(alpha_of_v):
        return alpha_of_v
    value = float(alpha_of_v)
    return lambda v: value


def equilibrium_point(v: float, alpha: float, params: VehicleParams, rank_rtol: float = RANK_RTOL) -> EquilibriumPoint:
    chi = solve_chi(v, alpha, params, rank_rtol=rank_rtol)
    f_f, f_b = trim_thrusts(v, alpha, chi, params)
    rank, _ = rank_check(chi, params, rank_rtol)
    return EquilibriumPoint(v, alpha, chi, f_f, f_b, equilibrium_residual(v, alpha, chi, params), rank)


def build_curve(v_grid, alpha_of_v, params: VehicleParams, rank_rtol: float = RANK_RTOL) -> EquilibriumCurve:
    """Equilibrium points along ``v_grid`` with alpha chosen by ``alpha_of_v``.

    ``alpha_of_v`` is a callable ``v -> alpha`` or a constant angle.
    """
    v_grid = [float(v) for v in v_grid]
    if not v_grid:
        raise ValueError("v_grid is empty")
    if any(b <= a for a, b in zip(v_grid, v_grid[1:])):
        raise ValueError("v_grid must be strictly increasing")
    policy = _as_alpha_policy(alpha_of_v)
    points = []
    for v in v_grid:
        try:
            points.append(equilibrium_point(v, policy(v), params, rank_rtol))
        except (NoRoot, Infeasible, RankDeficient) as exc:
            raise type(exc)(f"at v={v:g} m/s: {exc}") from exc
    return EquilibriumCurve(points, policy)


def speed_grid(v_min: float, v_max: float, dv: float) -> np.ndarray:
    if not dv > 0:
        raise ValueError("dv must be > 0")
    n = int(math.floor((v_max - v_min) / dv + 1e-9)) + 1
    grid = v_min + dv * np.arange(n)
    if v_max - grid[-1] > 1e-9:
        grid = np.append(grid, v_max)
    return grid


# --------------------------------------------------------------------------
# transition plan


@dataclass(frozen=True)
class PlanSample:
    t: float
    phase: Phase
    v_ref: float
    alpha_ref: float
    chi_nom: float
    z_ref: float
    v_dot_ref: float = 0.0
    alpha_dot_ref: float = 0.0


@dataclass
class TransitionPlan:
    samples: list[PlanSample]
    schedule: PhaseSchedule = field(repr=False)

    def __len__(self):
        return len(self.samples)

    def lookup(self, t: float) -> PlanSample:
        """Nearest-left sample (zero-order hold)."""
        i = int(math.floor(t / self.schedule.sample_dt + 1e-9))
        return self.samples[min(max(i, 0), len(self.samples) - 1)]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples], dtype=float)


def plan_transition(
    schedule: PhaseSchedule, curve: EquilibriumCurve, params: VehicleParams, rank_rtol: float = RANK_RTOL
) -> TransitionPlan:
    """Sample the four-phase reference at ``schedule.sample_dt``.

    Hovering holds the hover point.  Ready ramps (alpha, chi) linearly from
    zero to the curve's zero-speed point and holds it.  Acceleration ramps the
    speed linearly to ``v_cruise`` with alpha from the curve's schedule and
    chi solved on the equilibrium set.  Cruise holds the terminal point.
    """
    errors = schedule.validate()
    if errors:
        raise ScheduleError("; ".join(f"{k}: {m}" for k, m in errors))
    start, end = curve.start, curve.end
    if start.v != 0.0:
        raise ScheduleError(f"curve must start at v=0, starts at {start.v}")
    if abs(end.v - schedule.v_cruise) > 1e-9:
        raise ScheduleError(f"curve ends at v={end.v}, cruise target is {schedule.v_cruise}")

    ready_T = schedule.t_ready_converge - schedule.t_ready_start
    accel_T = schedule.t_accel_end - schedule.t_accel_start
    v_dot = schedule.v_cruise / accel_T
    alpha_of_v = curve.alpha_of_v
    z = schedule.z_ref

    samples = []
    for k in range(schedule.n_samples):
        t = k * schedule.sample_dt
        phase = phase_at(t, schedule)
        if phase is Phase.HOVERING:
            s = PlanSample(t, phase, 0.0, 0.0, 0.0, z)
        elif phase is Phase.READY:
            frac = min((t - schedule.t_ready_start) / ready_T, 1.0)
            ramping = frac < 1.0
            s = PlanSample(
                t,
                phase,
                0.0,
                frac * start.alpha,
                frac * start.chi,
                z,
                0.0,
                start.alpha / ready_T if ramping else 0.0,
            )
        elif phase is Phase.ACCELERATION:
            v = v_dot * (t - schedule.t_accel_start)
            alpha = alpha_of_v(v)
            chi = solve_chi(v, alpha, params, rank_rtol=rank_rtol)
            if hasattr(alpha_of_v, "slope"):
                alpha_dot = alpha_of_v.slope(v) * v_dot
            else:
                h = 1e-6
                alpha_dot = (alpha_of_v(v + h) - alpha) / h * v_dot
            s = PlanSample(t, phase, v, alpha, chi, z, v_dot, alpha_dot)
        else:
            s = PlanSample(t, phase, end.v, end.alpha, end.chi, z)
        samples.append(s)
    return TransitionPlan(samples, schedule)
