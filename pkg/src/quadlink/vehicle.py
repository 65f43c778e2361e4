"""Six-rotor quadlink vehicle: parameters, wrench maps, aerodynamics, equations of motion.

Rotor layout
------------
Rotors 1-4 sit on the quadlink, a bar hinged to the fuselage about the body
y-axis and tilted by ``chi`` (0 = rotors up, -pi/2 = rotors forward).
Rotors 1 and 2 share one side of the link, 3 and 4 the other; 5 and 6 are
fixed at the tail.  The joint carries no y-torque, so the link's y-moment
``tau_chi`` only accelerates the link.

Simulation state (flat vector, length 14)::

    [x_w(3), eta(3), v_b(3), omega_b(3), chi, chi_dot]
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NegativeThrust
from .rotations import GIMBAL_EPS, euler_rate, rotation_zyx

AIRSPEED_EPS = 0.1
STATE_SIZE = 14


@dataclass(frozen=True, eq=False)
class AeroParams:
    """Wing model. ``cl_poly``/``cd_poly`` are ascending-order coefficients in alpha."""

    rho: float
    S: float
    cl_poly: tuple[float, ...]
    cd_poly: tuple[float, ...]

    def coefficients(self, alpha: float) -> tuple[float, float]:
        cl = 0.0
        for c in reversed(self.cl_poly):
            cl = cl * alpha + c
        cd = 0.0
        for c in reversed(self.cd_poly):
            cd = cd * alpha + c
        return cl, cd

    def validate(self, n_grid: int = 2001) -> list[tuple[str, str]]:
        errors = []
        if not self.rho > 0:
            errors.append(("aero.rho", "must be > 0"))
        if not self.S >= 0:
            errors.append(("aero.S", "must be >= 0"))
        if len(self.cl_poly) == 0:
            errors.append(("aero.cl_poly", "needs at least one coefficient"))
        if len(self.cd_poly) == 0:
            errors.append(("aero.cd_poly", "needs at least one coefficient"))
        else:
            grid = np.linspace(-math.pi / 2, math.pi / 2, n_grid)
            cd = np.polynomial.polynomial.polyval(grid, self.cd_poly)
            if np.any(cd < 0):
                bad = grid[np.argmin(cd)]
                errors.append(("aero.cd_poly", f"C_D negative at alpha={bad:.4g} rad"))
        return errors


@dataclass(frozen=True, eq=False)
class VehicleParams:
    m: float
    J: np.ndarray
    J_link: float
    l_f: float
    l_fw: float
    l_fh: float
    l_b: float
    l_bw: float
    kappa: float
    g: float
    aero: AeroParams
    f_max: float = 5.0

    def __post_init__(self):
        object.__setattr__(self, "J", np.asarray(self.J, dtype=float).reshape(3, 3))

    @cached_property
    def J_inv(self) -> np.ndarray:
        return np.linalg.inv(self.J)

    @property
    def weight(self) -> float:
        return self.m * self.g

    def validate(self) -> list[tuple[str, str]]:
        errors = []
        for name in ("m", "J_link", "l_f", "l_fw", "l_fh", "l_b", "l_bw", "kappa", "g", "f_max"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                errors.append((f"vehicle.{name}", f"must be > 0, got {value!r}"))
        J = self.J
        if not np.all(np.isfinite(J)):
            errors.append(("vehicle.J", "non-finite entries"))
        elif not np.allclose(J, J.T):
            errors.append(("vehicle.J", "must be symmetric"))
        elif np.min(np.linalg.eigvalsh(J)) <= 0:
            errors.append(("vehicle.J", "must be positive definite"))
        errors.extend(self.aero.validate())
        return errors


@dataclass
class RigidBodyState:
    x_w: np.ndarray = field(default_factory=lambda: np.zeros(3))
    eta: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v_b: np.ndarray = field(default_factory=lambda: np.zeros(3))
    omega_b: np.ndarray = field(default_factory=lambda: np.zeros(3))
    chi: float = 0.0
    chi_dot: float = 0.0

    def __post_init__(self):
        for name in ("x_w", "eta", "v_b", "omega_b"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float).reshape(3))
        self.chi = float(self.chi)
        self.chi_dot = float(self.chi_dot)

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.x_w, self.eta, self.v_b, self.omega_b, [self.chi, self.chi_dot]])

    @classmethod
    def from_array(cls, y) -> "RigidBodyState":
        y = np.asarray(y, dtype=float)
        return cls(y[0:3].copy(), y[3:6].copy(), y[6:9].copy(), y[9:12].copy(), y[12], y[13])


@dataclass
class ReducedThrusts:
    """``f_plus = [f1+f2, f3+f4, f5, f6]``, ``f_minus = [f1-f2, f3-f4]``."""

    f_plus: np.ndarray
    f_minus: np.ndarray

    def __post_init__(self):
        self.f_plus = np.asarray(self.f_plus, dtype=float).reshape(4)
        self.f_minus = np.asarray(self.f_minus, dtype=float).reshape(2)

    def is_realizable(self) -> bool:
        return bool(np.all(np.abs(self.f_minus) <= self.f_plus[:2]) and np.all(self.f_plus[2:] >= 0))


@dataclass
class BodyWrench:
    f_b: np.ndarray
    tau_b: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.f_b, self.tau_b])


# --------------------------------------------------------------------------
# rotor wrench


def rotor_matrix(chi: float, params: VehicleParams) -> np.ndarray:
    """6x6 map from ``[f1..f6]`` to ``[f_x, f_y, f_z, tau_x, tau_y, tau_z]`` in the body frame."""
    S, C = math.sin(chi), math.cos(chi)
    lf, lfw, lb, lbw, k = params.l_f, params.l_fw, params.l_b, params.l_bw, params.kappa
    lam1 = [-S, 0.0, -C, -lfw * C - k * S, lf * C, lfw * S - k * C]
    lam2 = [-S, 0.0, -C, lfw * C + k * S, lf * C, -lfw * S + k * C]
    lam3 = [0.0, 0.0, -1.0, -lbw, -lb, k]
    lam4 = [0.0, 0.0, -1.0, lbw, -lb, -k]
    return np.array([lam1, lam1, lam2, lam2, lam3, lam4]).T


def link_torque_row(params: VehicleParams) -> np.ndarray:
    h = params.l_fh
    return np.array([h, -h, h, -h, 0.0, 0.0])


def effectiveness_matrix(chi: float, params: VehicleParams) -> np.ndarray:
    """5x4 map ``M(chi)`` from ``f_plus`` to ``[f_x, f_z, tau_x, tau_y, tau_z]``."""
    S, C = math.sin(chi), math.cos(chi)
    lf, lfw, lb, lbw, k = params.l_f, params.l_fw, params.l_b, params.l_bw, params.kappa
    return np.array(
        [
            [-S, -S, 0.0, 0.0],
            [-C, -C, -1.0, -1.0],
            [-lfw * C - k * S, lfw * C + k * S, -lbw, lbw],
            [lf * C, lf * C, -lb, -lb],
            [lfw * S - k * C, -lfw * S + k * C, k, -k],
        ]
    )


def effectiveness_matrix_dchi(chi: float, params: VehicleParams) -> np.ndarray:
    """Element-wise derivative of :func:`effectiveness_matrix` with respect to ``chi``."""
    S, C = math.sin(chi), math.cos(chi)
    lf, lfw, k = params.l_f, params.l_fw, params.kappa
    return np.array(
        [
            [-C, -C, 0.0, 0.0],
            [S, S, 0.0, 0.0],
            [lfw * S - k * C, -lfw * S + k * C, 0.0, 0.0],
            [-lf * S, -lf * S, 0.0, 0.0],
            [lfw * C + k * S, -lfw * C - k * S, 0.0, 0.0],
        ]
    )


def link_torque_from_minus(f_minus, params: VehicleParams) -> float:
    f_minus = np.asarray(f_minus, dtype=float)
    return params.l_fh * (f_minus[0] + f_minus[1])


def rotor_wrench(thrusts, chi: float, params: VehicleParams) -> tuple[BodyWrench, float]:
    """Body wrench and link torque generated by the six rotor thrusts."""
    f = np.asarray(thrusts, dtype=float).reshape(6)
    w = rotor_matrix(chi, params) @ f
    tau_chi = float(link_torque_row(params) @ f)
    return BodyWrench(w[:3], w[3:]), tau_chi


def reduce_thrusts(thrusts) -> ReducedThrusts:
    f = np.asarray(thrusts, dtype=float).reshape(6)
    return ReducedThrusts([f[0] + f[1], f[2] + f[3], f[4], f[5]], [f[0] - f[1], f[2] - f[3]])


def mix_thrusts(r: ReducedThrusts, strict: bool = True) -> np.ndarray:
    """Per-rotor thrusts from reduced coordinates.

    With ``strict`` a negative rotor thrust raises :class:`NegativeThrust`;
    otherwise the raw (possibly negative) split is returned for the caller to
    saturate.
    """
    p, d = r.f_plus, r.f_minus
    f = np.array(
        [
            0.5 * (p[0] + d[0]),
            0.5 * (p[0] - d[0]),
            0.5 * (p[1] + d[1]),
            0.5 * (p[1] - d[1]),
            p[2],
            p[3],
        ]
    )
    if strict and np.any(f < 0):
        idx = [i + 1 for i in np.flatnonzero(f < 0)]
        raise NegativeThrust(f"rotor(s) {idx} would need negative thrust: {f}")
    return f


# --------------------------------------------------------------------------
# aerodynamics


def angle_of_attack(v_b) -> float:
    vx, vz = float(v_b[0]), float(v_b[2])
    if math.hypot(vx, vz) < AIRSPEED_EPS:
        return 0.0
    return math.atan2(vz, vx)


def lift_drag(speed: float, alpha: float, aero: AeroParams) -> tuple[float, float]:
    """``(L, D)`` at stability-frame speed ``speed`` and angle of attack ``alpha``."""
    cl, cd = aero.coefficients(alpha)
    qs = 0.5 * aero.rho * speed * speed * aero.S
    return qs * cl, qs * cd


def aero_wrench(v_b, aero: AeroParams) -> tuple[np.ndarray, np.ndarray]:
    """Aerodynamic force and torque in the stability frame."""
    speed = math.hypot(float(v_b[0]), float(v_b[2]))
    L, D = lift_drag(speed, angle_of_attack(v_b), aero)
    return np.array([-D, 0.0, -L]), np.zeros(3)


def _aero_force_body(vx: float, vz: float, aero: AeroParams) -> tuple[float, float]:
    """Body-frame (x, z) aerodynamic force; ``Ry(alpha)^T [-D, 0, -L]``."""
    speed = math.hypot(vx, vz)
    if speed < AIRSPEED_EPS:
        alpha, ca, sa = 0.0, 1.0, 0.0
    else:
        alpha = math.atan2(vz, vx)
        ca, sa = vx / speed, vz / speed
    L, D = lift_drag(speed, alpha, aero)
    return -ca * D + sa * L, -sa * D - ca * L


def total_wrench(state: RigidBodyState, thrusts, params: VehicleParams) -> BodyWrench:
    rot, _ = rotor_wrench(thrusts, state.chi, params)
    ax, az = _aero_force_body(state.v_b[0], state.v_b[2], params.aero)
    R = rotation_zyx(state.eta)
    gravity_b = R[2, :] * params.weight
    f = rot.f_b + np.array([ax, 0.0, az]) + gravity_b
    return BodyWrench(f, rot.tau_b.copy())


# --------------------------------------------------------------------------
# equations of motion


def _cross(a, b) -> np.ndarray:
    # np.cross carries heavy per-call overhead for 3-vectors
    return np.array([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def state_derivative(y: np.ndarray, thrusts: np.ndarray, params: VehicleParams) -> np.ndarray:
    """Time derivative of the flat state vector under constant rotor thrusts."""
    eta = y[3:6]
    v = y[6:9]
    w = y[9:12]
    chi = y[12]

    R = rotation_zyx(eta)
    wrench = rotor_matrix(chi, params) @ thrusts
    ax, az = _aero_force_body(v[0], v[2], params.aero)
    f = wrench[:3] + R[2, :] * params.weight
    f[0] += ax
    f[2] += az

    dy = np.empty(STATE_SIZE)
    dy[0:3] = R @ v
    dy[3:6] = euler_rate(eta, w, GIMBAL_EPS)
    dy[6:9] = f / params.m - _cross(w, v)
    J = params.J
    dy[9:12] = params.J_inv @ (wrench[3:] - _cross(w, J @ w))
    dy[12] = y[13]
    dy[13] = (link_torque_row(params) @ thrusts) / params.J_link
    return dy


def dynamics_derivative(state: RigidBodyState, thrusts, params: VehicleParams) -> RigidBodyState:
    """Derivative of ``state`` packed in a :class:`RigidBodyState` (``chi`` slot holds chi_dot)."""
    f = np.asarray(thrusts, dtype=float).reshape(6)
    return RigidBodyState.from_array(state_derivative(state.to_array(), f, params))


def rk4_step(y: np.ndarray, thrusts: np.ndarray, params: VehicleParams, dt: float) -> np.ndarray:
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    k1 = state_derivative(y, thrusts, params)
    k2 = state_derivative(y + 0.5 * dt * k1, thrusts, params)
    k3 = state_derivative(y + 0.5 * dt * k2, thrusts, params)
    k4 = state_derivative(y + dt * k3, thrusts, params)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_rk4(state: RigidBodyState, thrusts, params: VehicleParams, dt: float) -> RigidBodyState:
    """One classical RK4 step with the thrusts held over the step."""
    f = np.asarray(thrusts, dtype=float).reshape(6)
    return RigidBodyState.from_array(rk4_step(state.to_array(), f, params, dt))
