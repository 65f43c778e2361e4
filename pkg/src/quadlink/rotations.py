"""Elementary rotations and the two Euler-angle conventions used by the vehicle.

Attitude is carried as Z-Y-X roll/pitch/yaw ``eta = (phi, theta, psi)`` with
``R(eta) = Rz(psi) @ Ry(theta) @ Rx(phi)`` mapping body vectors to the NED
frame.  The cruise controller re-expresses the same matrix in a Y-X-Z
sequence ``R = Rz(psi_t) @ Rx(phi_t) @ Ry(theta_t)`` so that pitch enters
last and can be driven independently.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import Degenerate, GimbalLock

GIMBAL_EPS = 1e-3


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_zyx(eta) -> np.ndarray:
    """Body-to-NED rotation for roll/pitch/yaw ``eta``."""
    phi, theta, psi = eta
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
            [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
            [-st, ct * sf, ct * cf],
        ]
    )


def euler_rate(eta, omega_b, eps: float = GIMBAL_EPS) -> np.ndarray:
    """Roll/pitch/yaw rates from body angular velocity.

    Raises
    ------
    GimbalLock
        If ``|theta| >= pi/2 - eps``.
    """
    phi, theta, _ = eta
    if abs(theta) >= math.pi / 2 - eps:
        raise GimbalLock(f"pitch {theta:.6g} rad is within {eps:g} of +-pi/2")
    p, q, r = omega_b
    sf, cf = math.sin(phi), math.cos(phi)
    tt = math.tan(theta)
    ct = math.cos(theta)
    return np.array(
        [
            p + sf * tt * q + cf * tt * r,
            cf * q - sf * r,
            (sf * q + cf * r) / ct,
        ]
    )


def euler_zyx_from_rotation(R: np.ndarray, eps: float = GIMBAL_EPS) -> np.ndarray:
    s = -R[2, 0]
    if abs(s) >= math.cos(eps):
        raise GimbalLock("pitch at +-pi/2, Z-Y-X angles undefined")
    theta = math.asin(max(-1.0, min(1.0, s)))
    phi = math.atan2(R[2, 1], R[2, 2])
    psi = math.atan2(R[1, 0], R[0, 0])
    return np.array([phi, theta, psi])


def rotation_yxz(angles) -> np.ndarray:
    """``Rz(psi_t) @ Rx(phi_t) @ Ry(theta_t)`` for ``angles = (theta_t, phi_t, psi_t)``."""
    theta, phi, psi = angles
    return rot_z(psi) @ rot_x(phi) @ rot_y(theta)


def yxz_angles_from_rotation(R: np.ndarray, eps: float = GIMBAL_EPS) -> tuple[float, float, float]:
    """Decompose ``R = Rz(psi_t) Rx(phi_t) Ry(theta_t)``.

    Returns ``(theta_t, phi_t, psi_t)``.  The bottom row of ``R`` is
    ``[-cos(phi) sin(theta), sin(phi), cos(phi) cos(theta)]`` and the middle
    column is ``[-sin(psi) cos(phi), cos(psi) cos(phi), sin(phi)]``.
    """
    s = R[2, 1]
    if abs(s) >= math.cos(eps):
        raise Degenerate(f"Y-X-Z roll within {eps:g} rad of +-pi/2")
    phi = math.asin(max(-1.0, min(1.0, s)))
    theta = math.atan2(-R[2, 0], R[2, 2])
    psi = math.atan2(-R[0, 1], R[1, 1])
    return theta, phi, psi


def yxz_rates_to_body(angles, rates) -> np.ndarray:
    """Body angular velocity produced by Y-X-Z angle rates.

    ``angles`` is ``(theta_t, phi_t, psi_t)``; ``rates`` is
    ``(phi_t_dot, theta_t_dot, psi_t_dot)`` in roll/pitch/yaw order.
    """
    theta, phi, _ = angles
    dphi, dtheta, dpsi = rates
    if abs(phi) >= math.pi / 2 - GIMBAL_EPS:
        raise Degenerate(f"Y-X-Z roll {phi:.6g} rad too close to +-pi/2")
    w_mid = np.array([dphi, math.sin(phi) * dpsi, math.cos(phi) * dpsi])
    w = rot_y(theta).T @ w_mid
    w[1] += dtheta
    return w


def body_to_yxz_rates(angles, omega_b) -> np.ndarray:
    """Inverse of :func:`yxz_rates_to_body`; returns ``(phi_t_dot, theta_t_dot, psi_t_dot)``."""
    theta, phi, _ = angles
    if abs(phi) >= math.pi / 2 - GIMBAL_EPS:
        raise Degenerate(f"Y-X-Z roll {phi:.6g} rad too close to +-pi/2")
    # Ry(theta) @ omega = [dphi, sin(phi) dpsi + dtheta, cos(phi) dpsi]
    w_mid = rot_y(theta) @ np.asarray(omega_b, dtype=float)
    dphi = w_mid[0]
    dpsi = w_mid[2] / math.cos(phi)
    dtheta = w_mid[1] - math.sin(phi) * dpsi
    return np.array([dphi, dtheta, dpsi])


def skew(a) -> np.ndarray:
    x, y, z = a
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
