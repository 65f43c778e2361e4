"""Attitude-rate and tilt-angle PID loops."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..vehicle import VehicleParams


@dataclass(frozen=True)
class PIDGains:
    kp: float
    ki: float
    kd: float
    i_limit: float = np.inf

    def validate(self, prefix: str) -> list[tuple[str, str]]:
        errors = []
        for name in ("kp", "ki", "kd"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                errors.append((f"{prefix}.{name}", f"must be finite and >= 0, got {value!r}"))
        if not self.i_limit > 0:
            errors.append((f"{prefix}.i_limit", "must be > 0"))
        return errors


@dataclass
class AttitudePID:
    """Rate loop producing the body torque reference ``J * omega_dot_ref``.

    The derivative acts on the measured rate, estimated by a first difference
    passed through a one-pole low-pass with time constant ``tau_f``.
    """

    gains: PIDGains
    J: np.ndarray
    tau_f: float = 0.01
    integral: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rate_dot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    prev_omega: np.ndarray | None = None

    def reset(self) -> None:
        self.integral = np.zeros(3)
        self.rate_dot = np.zeros(3)
        self.prev_omega = None

    def update(self, omega_b: np.ndarray, omega_ref: np.ndarray, dt: float) -> np.ndarray:
        if not dt > 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        g = self.gains
        err = omega_ref - omega_b
        self.integral = np.clip(self.integral + err * dt, -g.i_limit, g.i_limit)
        if self.prev_omega is not None:
            raw = (omega_b - self.prev_omega) / dt
            a = dt / (self.tau_f + dt)
            self.rate_dot = self.rate_dot + a * (raw - self.rate_dot)
        self.prev_omega = np.array(omega_b, dtype=float)
        omega_dot_ref = g.kp * err + g.ki * self.integral - g.kd * self.rate_dot
        return self.J @ omega_dot_ref


def attitude_pid(omega_b, omega_ref, gains: PIDGains, dt: float, state: AttitudePID) -> np.ndarray:
    """Functional form of :meth:`AttitudePID.update`; ``state`` carries the memory."""
    if state.gains is not gains:
        state.gains = gains
    return state.update(np.asarray(omega_b, dtype=float), np.asarray(omega_ref, dtype=float), dt)


def split_link_torque(tau_chi: float, params: VehicleParams) -> np.ndarray:
    """Minimum-norm ``f_minus`` with ``l_fh (f_minus[0] + f_minus[1]) = tau_chi``."""
    d = tau_chi / (2.0 * params.l_fh)
    return np.array([d, d])


@dataclass
class TiltPID:
    """Quadlink angle loop.

    ``tau_chi = scale * (kp e + ki int(e) + kd (chi_ref_dot - chi_dot))``
    with ``e = chi_ref - chi``.  The link rate is measured; the reference
    rate comes from a first difference of ``chi_ref`` through a one-pole
    low-pass of time constant ``ref_tau`` (``ref_tau = None`` drops the
    reference-rate term).  ``scale`` is ``J_link`` when the gains are read as
    angular-acceleration gains, 1 when they are torque gains.
    """

    gains: PIDGains
    params: VehicleParams
    inertia_scaled: bool = True
    ref_tau: float | None = 0.1
    integral: float = 0.0
    ref_rate: float = 0.0
    prev_ref: float | None = None

    def reset(self) -> None:
        self.integral = 0.0
        self.ref_rate = 0.0
        self.prev_ref = None

    def torque(self, chi: float, chi_dot: float, chi_ref: float, dt: float) -> float:
        if not dt > 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        g = self.gains
        err = chi_ref - chi
        self.integral = min(max(self.integral + err * dt, -g.i_limit), g.i_limit)
        if self.ref_tau is not None and self.prev_ref is not None:
            raw = (chi_ref - self.prev_ref) / dt
            self.ref_rate += dt / (self.ref_tau + dt) * (raw - self.ref_rate)
        self.prev_ref = chi_ref
        out = g.kp * err + g.ki * self.integral + g.kd * (self.ref_rate - chi_dot)
        return self.params.J_link * out if self.inertia_scaled else out

    def update(self, chi: float, chi_dot: float, chi_ref: float, dt: float) -> np.ndarray:
        return split_link_torque(self.torque(chi, chi_dot, chi_ref, dt), self.params)


def tilt_pid(chi, chi_dot, chi_ref, gains: PIDGains, dt: float, state: TiltPID) -> np.ndarray:
    if state.gains is not gains:
        state.gains = gains
    return state.update(float(chi), float(chi_dot), float(chi_ref), dt)
