"""Closed-loop hover-to-cruise transition simulation."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig
from .control.allocation import allocate
from .control.pid import AttitudePID, TiltPID
from .control.position import cruise_position_control, hover_position_control, output_transform
from .control.schedule import GainSchedule, build_gain_schedule
from .errors import Diverged, GimbalLock, QuadlinkError
from .phases import Phase
from .rotations import rot_y, rotation_zyx, yxz_angles_from_rotation
from .trim import (
    AlphaSchedule,
    EquilibriumCurve,
    TransitionPlan,
    build_curve,
    lift_balance_alpha,
    plan_transition,
    speed_grid,
)
from .vehicle import ReducedThrusts, RigidBodyState, mix_thrusts, rk4_step

log = logging.getLogger("quadlink.sim")

LOG_COLUMNS = (
    "t,x,y,z,vx,vy,vz,phi,theta,psi,wx,wy,wz,chi,chi_dot,"
    "f1,f2,f3,f4,f5,f6,phase,v_ref,alpha_ref,chi_ref,chi_nom"
).split(",")


@dataclass
class LogRecord:
    t: float
    x_w: np.ndarray
    eta: np.ndarray
    v_b: np.ndarray
    omega_b: np.ndarray
    chi: float
    chi_dot: float
    f: np.ndarray
    phase: Phase
    v_ref: float
    alpha_ref: float
    chi_ref: float
    chi_nom: float

    def as_row(self) -> list[float]:
        return [
            self.t,
            *self.x_w,
            *self.v_b,
            *self.eta,
            *self.omega_b,
            self.chi,
            self.chi_dot,
            *self.f,
            int(self.phase),
            self.v_ref,
            self.alpha_ref,
            self.chi_ref,
            self.chi_nom,
        ]


@dataclass
class Reference:
    """Everything computed offline before the loop runs."""

    alpha_policy: AlphaSchedule
    curve: EquilibriumCurve
    plan: TransitionPlan
    gains: GainSchedule


@dataclass
class SimulationResult:
    records: list[LogRecord]
    reference: Reference
    saturation_count: int = 0
    wall_time: float = 0.0
    _array: np.ndarray | None = field(default=None, repr=False)

    def array(self) -> np.ndarray:
        """Log as an ``(n, 26)`` array in :data:`LOG_COLUMNS` order."""
        if self._array is None:
            self._array = np.array([r.as_row() for r in self.records], dtype=float)
        return self._array

    def column(self, name: str) -> np.ndarray:
        return self.array()[:, LOG_COLUMNS.index(name)]


def alpha_policy(config: SimConfig) -> AlphaSchedule:
    p = config.plan
    alpha_c = p.alpha_cruise
    if alpha_c is None:
        alpha_c = lift_balance_alpha(config.schedule.v_cruise, config.vehicle, p.lift_fraction)
    return AlphaSchedule(p.alpha_start, alpha_c, p.v_knee)


def build_reference(config: SimConfig) -> Reference:
    """Equilibrium curve, transition plan and gain schedule for ``config``."""
    params = config.vehicle
    policy = alpha_policy(config)
    grid = speed_grid(0.0, config.schedule.v_cruise, config.plan.dv)
    curve = build_curve(grid, policy, params, config.plan.rank_rtol)
    plan = plan_transition(config.schedule, curve, params, config.plan.rank_rtol)
    gains = build_gain_schedule(plan, config.hover_weights, config.cruise_weights, params)
    return Reference(policy, curve, plan, gains)


def initial_state(config: SimConfig) -> RigidBodyState:
    """At rest at the origin."""
    return RigidBodyState()


def run_simulation(
    config: SimConfig,
    reference: Reference | None = None,
    state0: RigidBodyState | None = None,
    t_start: float = 0.0,
    t_stop: float | None = None,
) -> SimulationResult:
    """Integrate the closed loop from ``t_start`` to ``t_stop`` (default ``t_end``).

    Raises
    ------
    Diverged
        State left the configured bounds; ``exc.t`` is the last valid time.
    QuadlinkError
        Controller or allocation failures, annotated with the time.
    """
    wall0 = time.perf_counter()
    if reference is None:
        reference = build_reference(config)
    params = config.vehicle
    sched = config.schedule
    opts = config.sim
    dt = sched.dt
    gains = reference.gains
    t_stop = sched.t_end if t_stop is None else t_stop
    k0 = int(round(t_start / dt))
    k1 = int(round(t_stop / dt))

    y = (state0 or initial_state(config)).to_array()
    att = AttitudePID(config.attitude_gains, params.J, config.attitude_tau_f)
    tilt = TiltPID(config.tilt_gains, params, config.tilt_inertia_scaled, config.tilt_ref_tau)
    f_max = params.f_max
    strict = opts.strict_allocation
    chi_hint = None

    records = []
    saturations = 0
    t = k0 * dt
    for k in range(k0, k1 + 1):
        t = k * dt
        entry = gains.lookup(t)
        try:
            if entry.is_hover:
                xi = np.concatenate([y[0:3], y[6:9], y[3:6]])
                u = hover_position_control(xi, entry.K, entry.x_ref, entry.u_ref)
                f_x, f_z, omega_ref = 0.0, u[0], u[1:4]
            else:
                theta_t, phi_t, psi_t = yxz_angles_from_rotation(rotation_zyx(y[3:6]))
                xi = np.concatenate([y[0:3], rot_y(theta_t) @ y[6:9], [phi_t, theta_t, psi_t]])
                u = cruise_position_control(xi, entry.K, entry.x_ref, entry.u_ref, entry.hold_x)
                cmd = output_transform(u, (phi_t, theta_t, psi_t))
                f_x, f_z, omega_ref = cmd.f_x, cmd.f_z, cmd.omega_ref
            tau = att.update(y[9:12], omega_ref, dt)
            if entry.is_hover:
                chi_ref, f_plus = allocate(0.0, f_z, tau, params, hover=True, strict=strict)
                chi_hint = None
            else:
                hint = entry.chi_nom if chi_hint is None else chi_hint
                chi_ref, f_plus = allocate(f_x, f_z, tau, params, chi_hint=hint, strict=strict)
                chi_hint = chi_ref
            f_minus = tilt.update(y[12], y[13], chi_ref, dt)
        except QuadlinkError as exc:
            raise type(exc)(f"t={t:.3f} s: {exc}") from exc

        f = mix_thrusts(ReducedThrusts(f_plus, f_minus), strict=False)
        if np.any(f < 0.0) or np.any(f > f_max):
            if saturations == 0:
                log.warning("rotor thrust saturated at t=%.3f s: %s", t, np.array2string(f, precision=4))
            saturations += 1
            f = np.clip(f, 0.0, f_max)

        if (k - k0) % opts.decimate == 0 or k == k1:
            records.append(
                LogRecord(
                    t,
                    y[0:3].copy(),
                    y[3:6].copy(),
                    y[6:9].copy(),
                    y[9:12].copy(),
                    float(y[12]),
                    float(y[13]),
                    f,
                    entry.phase,
                    entry.v_ref,
                    entry.alpha_ref,
                    float(chi_ref),
                    entry.chi_nom,
                )
            )
        if k == k1:
            break

        try:
            y_next = rk4_step(y, f, params, dt)
        except GimbalLock as exc:
            raise Diverged(f"attitude reached gimbal lock after t={t:.3f} s: {exc}", t) from exc
        if not np.all(np.isfinite(y_next)):
            raise Diverged(f"non-finite state after t={t:.3f} s", t)
        if np.max(np.abs(y_next[0:3])) > opts.max_position:
            raise Diverged(f"position exceeded {opts.max_position:g} m after t={t:.3f} s", t)
        if max(np.max(np.abs(y_next[9:12])), abs(y_next[13])) > opts.max_rate:
            raise Diverged(f"angular rate exceeded {opts.max_rate:g} rad/s after t={t:.3f} s", t)
        y = y_next

    if saturations:
        log.warning("%d control steps saturated rotor thrust", saturations)
    return SimulationResult(records, reference, saturations, time.perf_counter() - wall0)


# --------------------------------------------------------------------------
# convergence report


@dataclass
class ConvergenceReport:
    window: tuple[float, float]
    speed_error: float
    pitch_error: float
    chi_error: float
    altitude_error: float
    tolerances: dict

    @property
    def checks(self) -> dict[str, tuple[float, float, bool]]:
        vals = {
            "speed": self.speed_error,
            "pitch": self.pitch_error,
            "chi": self.chi_error,
            "altitude": self.altitude_error,
        }
        return {k: (v, self.tolerances[k], bool(v <= self.tolerances[k])) for k, v in vals.items()}

    @property
    def ok(self) -> bool:
        return all(c[2] for c in self.checks.values())

    def format(self) -> str:
        lines = [f"cruise convergence over t in [{self.window[0]:g}, {self.window[1]:g}] s"]
        for name, (value, tol, passed) in self.checks.items():
            lines.append(f"  {name:<9s} max error {value:.3e}  tol {tol:g}  {'PASS' if passed else 'FAIL'}")
        return "\n".join(lines)


def check_cruise_convergence(
    result: SimulationResult | np.ndarray,
    v_cruise: float,
    z_ref: float,
    tol: dict | None = None,
    window: float = 10.0,
) -> ConvergenceReport:
    """Worst deviations from the planned cruise over the last ``window`` seconds.

    Speed is the in-plane airspeed ``hypot(vx, vz)``; pitch and tilt are
    compared with the logged ``alpha_ref`` and ``chi_nom``.

    Raises
    ------
    ValueError
        If the log holds no cruise-phase rows inside the window.
    """
    data = result.array() if isinstance(result, SimulationResult) else np.asarray(result, dtype=float)
    if data.size == 0:
        raise ValueError("empty log")
    col = {name: i for i, name in enumerate(LOG_COLUMNS)}
    t = data[:, col["t"]]
    t_last = t[-1]
    mask = (t >= t_last - window - 1e-9) & (data[:, col["phase"]] == int(Phase.CRUISE))
    if not np.any(mask):
        raise ValueError("no cruise-phase samples in the convergence window")
    w = data[mask]
    speed = np.hypot(w[:, col["vx"]], w[:, col["vz"]])
    tol = {"speed": 0.5, "pitch": 0.05, "chi": 0.02, "altitude": 0.1, **(tol or {})}
    return ConvergenceReport(
        (float(w[0, col["t"]]), float(t_last)),
        float(np.max(np.abs(speed - v_cruise))),
        float(np.max(np.abs(w[:, col["theta"]] - w[:, col["alpha_ref"]]))),
        float(np.max(np.abs(w[:, col["chi"]] - w[:, col["chi_nom"]]))),
        float(np.max(np.abs(w[:, col["z"]] - z_ref))),
        tol,
    )


def report_for(result: SimulationResult, config: SimConfig) -> ConvergenceReport:
    r = config.report
    tol = {"speed": r.tol_speed, "pitch": r.tol_pitch, "chi": r.tol_chi, "altitude": r.tol_altitude}
    return check_cruise_convergence(result, config.schedule.v_cruise, config.schedule.z_ref, tol, r.window)
