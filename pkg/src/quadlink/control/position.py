"""Position controllers and the coordinate changes around the cruise model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..rotations import (
    body_to_yxz_rates,
    rot_y,
    rotation_yxz,
    rotation_zyx,
    euler_zyx_from_rotation,
    yxz_angles_from_rotation,
    yxz_rates_to_body,
)
from ..vehicle import RigidBodyState


@dataclass
class PositionCommand:
    """Body-frame rotor force ``(f_x, f_z)`` and angular-rate reference."""

    f_x: float
    f_z: float
    omega_ref: np.ndarray


def hover_state(state: RigidBodyState) -> np.ndarray:
    return np.concatenate([state.x_w, state.v_b, state.eta])


def hover_position_control(xi: np.ndarray, K: np.ndarray, xi_ref: np.ndarray, u_ref: np.ndarray) -> np.ndarray:
    """``u = u_ref - K (xi - xi_ref)`` with ``u = [f_z, omega_ref(3)]``."""
    return u_ref - K @ (xi - xi_ref)


def cruise_state_transform(state: RigidBodyState) -> np.ndarray:
    """``[x_w, Ry(theta_t) v_b, (phi_t, theta_t, psi_t)]`` from the simulation state."""
    theta, phi, psi = yxz_angles_from_rotation(rotation_zyx(state.eta))
    v_t = rot_y(theta) @ state.v_b
    return np.concatenate([state.x_w, v_t, [phi, theta, psi]])


def cruise_state_inverse(
    xi_t: np.ndarray, omega_b=(0.0, 0.0, 0.0), chi: float = 0.0, chi_dot: float = 0.0
) -> RigidBodyState:
    """Rebuild a :class:`RigidBodyState` from the cruise coordinates."""
    phi, theta, psi = xi_t[6:9]
    R = rotation_yxz((theta, phi, psi))
    eta = euler_zyx_from_rotation(R)
    v_b = rot_y(theta).T @ np.asarray(xi_t[3:6], dtype=float)
    return RigidBodyState(np.asarray(xi_t[0:3], dtype=float), eta, v_b, omega_b, chi, chi_dot)


def cruise_position_control(
    xi_t: np.ndarray,
    K: np.ndarray,
    xi_ref: np.ndarray,
    u_ref: np.ndarray,
    hold_x: bool = False,
) -> np.ndarray:
    """``u_t = u_ref - K (xi_t - xi_ref)``; the x-position error is dropped unless ``hold_x``."""
    err = xi_t - xi_ref
    if not hold_x:
        err[0] = 0.0
    return u_ref - K @ err


def output_transform(u_t: np.ndarray, angles_t) -> PositionCommand:
    """Map ``[f_x_t, f_z_t, eta_t_dot]`` back to body force and body angular rate.

    ``angles_t`` is ``(phi_t, theta_t, psi_t)``.
    """
    phi, theta, psi = angles_t
    c, s = math.cos(theta), math.sin(theta)
    fx_t, fz_t = u_t[0], u_t[1]
    # Ry(theta)^T [fx, 0, fz]
    f_x = c * fx_t - s * fz_t
    f_z = s * fx_t + c * fz_t
    omega = yxz_rates_to_body((theta, phi, psi), u_t[2:5])
    return PositionCommand(f_x, f_z, omega)


def body_rates_to_tilde(angles_t, omega_b) -> np.ndarray:
    """Y-X-Z angle rates ``(phi_t_dot, theta_t_dot, psi_t_dot)`` for a body rate."""
    phi, theta, psi = angles_t
    return body_to_yxz_rates((theta, phi, psi), omega_b)
