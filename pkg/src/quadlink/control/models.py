"""Reduced nonlinear models used for gain synthesis.

Both models act on a 9-state ``[x_w(3), velocity(3), angles(3)]``.

Hover model (no aerodynamics)::

    x_dot   = R(eta) v_b
    v_b_dot = -omega x v_b + [0, 0, f_z] / m + R(eta)^T g
    eta_dot = E(eta) omega                  u = [f_z, omega(3)]

Cruise model with Y-X-Z angles ``(phi_t, theta_t, psi_t)`` and
``v_t = Ry(theta_t) v_b``::

    x_dot   = Rz(psi_t) Rx(phi_t) v_t
    v_t_dot = ([f_x, 0, f_z] + f_aero) / m + Rx^T Rz^T g - Omega x v_t
    eta_t_dot = u[2:5]                      u = [f_x, f_z, eta_t_dot(3)]

``Omega = [phi_t_dot, sin(phi_t) psi_t_dot, cos(phi_t) psi_t_dot]`` is the
rate of the yaw-roll frame.  The aerodynamic force is evaluated at the planned
pitch ``alpha_ref`` rather than ``theta_t``, so ``theta_t`` does not enter the
translational rows and its channel is an exact integrator.
"""
from __future__ import annotations

import math

import numpy as np

from ..rotations import euler_rate, rot_x, rot_z, rotation_zyx
from ..vehicle import VehicleParams, lift_drag

N_STATES = 9
HOVER_INPUTS = 4
CRUISE_INPUTS = 5


def hover_model(xi: np.ndarray, u: np.ndarray, params: VehicleParams) -> np.ndarray:
    v = xi[3:6]
    eta = xi[6:9]
    w = u[1:4]
    R = rotation_zyx(eta)
    out = np.empty(N_STATES)
    out[0:3] = R @ v
    out[3:6] = -np.cross(w, v) + R[2, :] * params.g
    out[5] += u[0] / params.m
    out[6:9] = euler_rate(eta, w)
    return out


def tilde_aero_force(v_t: np.ndarray, alpha_ref: float, params: VehicleParams) -> np.ndarray:
    """Aerodynamic force in the yaw-roll frame with the body held at pitch ``alpha_ref``."""
    vx, vz = float(v_t[0]), float(v_t[2])
    speed = math.hypot(vx, vz)
    if speed < 1e-12:
        return np.zeros(3)
    gamma = math.atan2(-vz, vx)
    L, D = lift_drag(speed, alpha_ref - gamma, params.aero)
    c, s = vx / speed, -vz / speed
    # Ry(gamma) @ [-D, 0, -L]
    return np.array([-c * D - s * L, 0.0, s * D - c * L])


def cruise_model(xi_t: np.ndarray, u_t: np.ndarray, params: VehicleParams, alpha_ref: float) -> np.ndarray:
    v = xi_t[3:6]
    phi, _, psi = xi_t[6:9]
    dphi, _, dpsi = u_t[2:5]
    Rzx = rot_z(psi) @ rot_x(phi)
    omega = np.array([dphi, math.sin(phi) * dpsi, math.cos(phi) * dpsi])
    out = np.empty(N_STATES)
    out[0:3] = Rzx @ v
    force = tilde_aero_force(v, alpha_ref, params)
    force[0] += u_t[0]
    force[2] += u_t[1]
    out[3:6] = force / params.m + Rzx[2, :] * params.g - np.cross(omega, v)
    out[6:9] = u_t[2:5]
    return out


def hover_reference(z_ref: float, params: VehicleParams) -> tuple[np.ndarray, np.ndarray]:
    xi = np.zeros(N_STATES)
    xi[2] = z_ref
    u = np.array([-params.weight, 0.0, 0.0, 0.0])
    return xi, u


def cruise_reference(
    v_ref: float,
    alpha_ref: float,
    z_ref: float,
    params: VehicleParams,
    v_dot_ref: float = 0.0,
    alpha_dot_ref: float = 0.0,
    x_ref: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Reference state and feedforward input for level flight at ``v_ref``.

    The velocity reference lies along the horizontal axis of the yaw-roll
    frame; its feedforward thrust cancels drag, lift deficit, and supplies
    the planned acceleration.
    """
    xi = np.array([x_ref, 0.0, z_ref, v_ref, 0.0, 0.0, 0.0, alpha_ref, 0.0])
    L, D = lift_drag(v_ref, alpha_ref, params.aero)
    u = np.array([params.m * v_dot_ref + D, L - params.weight, 0.0, alpha_dot_ref, 0.0])
    return xi, u
