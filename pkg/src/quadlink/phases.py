"""Flight phases and the time schedule that sequences them."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import OutOfRange, ScheduleError


class Phase(enum.IntEnum):
    HOVERING = 0
    READY = 1
    ACCELERATION = 2
    CRUISE = 3

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class PhaseSchedule:
    t_ready_start: float = 20.0
    t_ready_converge: float = 25.0
    t_accel_start: float = 30.0
    t_accel_end: float = 50.0
    t_end: float = 80.0
    v_cruise: float = 20.0
    z_ref: float = -5.0
    dt: float = 1e-3
    sample_dt: float = 0.1

    def validate(self) -> list[tuple[str, str]]:
        errors = []
        times = [self.t_ready_start, self.t_ready_converge, self.t_accel_start, self.t_accel_end, self.t_end]
        if not all(math.isfinite(t) for t in times):
            errors.append(("schedule", "phase times must be finite"))
        elif not (
            0 < self.t_ready_start < self.t_ready_converge <= self.t_accel_start < self.t_accel_end < self.t_end
        ):
            errors.append(
                (
                    "schedule",
                    "need 0 < t_ready_start < t_ready_converge <= t_accel_start < t_accel_end < t_end",
                )
            )
        if not self.dt > 0:
            errors.append(("schedule.dt", "must be > 0"))
        if not self.sample_dt > 0:
            errors.append(("schedule.sample_dt", "must be > 0"))
        if not self.v_cruise > 0:
            errors.append(("schedule.v_cruise", "must be > 0"))
        return errors

    def check(self) -> None:
        errors = self.validate()
        if errors:
            raise ScheduleError("; ".join(f"{k}: {m}" for k, m in errors))

    @property
    def n_samples(self) -> int:
        return int(round(self.t_end / self.sample_dt)) + 1

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def phase_at(t: float, schedule: PhaseSchedule) -> Phase:
    """Phase active at time ``t``; a boundary instant belongs to the later phase."""
    if not 0 <= t <= schedule.t_end:
        raise OutOfRange(f"t={t} outside [0, {schedule.t_end}]")
    if t < schedule.t_ready_start:
        return Phase.HOVERING
    if t < schedule.t_accel_start:
        return Phase.READY
    if t < schedule.t_accel_end:
        return Phase.ACCELERATION
    return Phase.CRUISE
