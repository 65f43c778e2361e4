"""Offline gain schedule along the transition plan."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NotStabilizable
from ..phases import Phase
from ..trim import TransitionPlan
from ..vehicle import VehicleParams
from .lqr import LinearModel, LQRWeights, is_hurwitz, linearize, solve_care
from .models import cruise_model, cruise_reference, hover_model, hover_reference


@dataclass
class GainEntry:
    t: float
    phase: Phase
    K: np.ndarray
    x_ref: np.ndarray
    u_ref: np.ndarray
    v_ref: float
    alpha_ref: float
    chi_nom: float

    @property
    def is_hover(self) -> bool:
        return self.phase is Phase.HOVERING

    @property
    def hold_x(self) -> bool:
        """Ready keeps the hover x-position; later phases leave x free."""
        return self.phase is Phase.READY


@dataclass
class GainSchedule:
    entries: list[GainEntry]
    sample_dt: float

    def __len__(self):
        return len(self.entries)

    def lookup(self, t: float) -> GainEntry:
        """Nearest-left entry (zero-order hold)."""
        i = int(math.floor(t / self.sample_dt + 1e-9))
        return self.entries[min(max(i, 0), len(self.entries) - 1)]

    @property
    def times(self) -> np.ndarray:
        return np.array([e.t for e in self.entries])


def hover_linear_model(z_ref: float, params: VehicleParams) -> LinearModel:
    xi, u = hover_reference(z_ref, params)
    return linearize(lambda x, v: hover_model(x, v, params), xi, u)


def cruise_linear_model(
    v_ref: float, alpha_ref: float, z_ref: float, params: VehicleParams, v_dot_ref: float = 0.0, alpha_dot_ref: float = 0.0
) -> LinearModel:
    xi, u = cruise_reference(v_ref, alpha_ref, z_ref, params, v_dot_ref, alpha_dot_ref)
    return linearize(lambda x, v: cruise_model(x, v, params, alpha_ref), xi, u)


def _synthesize(model: LinearModel, weights: LQRWeights, t: float) -> np.ndarray:
    try:
        _, K = solve_care(model.A, model.B, weights.Q, weights.R)
    except NotStabilizable as exc:
        raise NotStabilizable(f"t={t:g} s: {exc}") from exc
    if not is_hurwitz(model.A - model.B @ K):
        raise NotStabilizable(f"t={t:g} s: closed loop not strictly stable")
    return K


def build_gain_schedule(
    plan: TransitionPlan, hover_weights: LQRWeights, cruise_weights: LQRWeights, params: VehicleParams
) -> GainSchedule:
    """LQR gain and reference at every plan sample.

    Hovering samples share a single gain from the aero-free hover model.
    Later samples linearize the cruise model about the planned speed and
    angle of attack.

    Raises
    ------
    NotStabilizable
        With the failing sample time in the message.
    """
    entries = []
    hover_K = None
    cache: dict[tuple, np.ndarray] = {}
    for s in plan.samples:
        if s.phase is Phase.HOVERING:
            if hover_K is None:
                hover_K = _synthesize(hover_linear_model(s.z_ref, params), hover_weights, s.t)
            x_ref, u_ref = hover_reference(s.z_ref, params)
            K = hover_K
        else:
            key = (s.v_ref, s.alpha_ref, s.z_ref, s.v_dot_ref, s.alpha_dot_ref)
            K = cache.get(key)
            if K is None:
                model = cruise_linear_model(s.v_ref, s.alpha_ref, s.z_ref, params, s.v_dot_ref, s.alpha_dot_ref)
                K = _synthesize(model, cruise_weights, s.t)
                cache[key] = K
            x_ref, u_ref = cruise_reference(s.v_ref, s.alpha_ref, s.z_ref, params, s.v_dot_ref, s.alpha_dot_ref)
        entries.append(GainEntry(s.t, s.phase, K, x_ref, u_ref, s.v_ref, s.alpha_ref, s.chi_nom))
    return GainSchedule(entries, plan.schedule.sample_dt)
