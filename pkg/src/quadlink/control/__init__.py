"""Position, attitude and tilt controllers, allocation and LQR synthesis."""
from .allocation import allocate
from .lqr import LinearModel, LQRWeights, linearize, solve_care
from .pid import AttitudePID, PIDGains, TiltPID, attitude_pid, tilt_pid
from .position import (
    cruise_position_control,
    cruise_state_inverse,
    cruise_state_transform,
    hover_position_control,
    output_transform,
)
from .schedule import GainEntry, GainSchedule, build_gain_schedule

__all__ = [
    "AttitudePID",
    "GainEntry",
    "GainSchedule",
    "LQRWeights",
    "LinearModel",
    "PIDGains",
    "TiltPID",
    "allocate",
    "attitude_pid",
    "build_gain_schedule",
    "cruise_position_control",
    "cruise_state_inverse",
    "cruise_state_transform",
    "hover_position_control",
    "linearize",
    "output_transform",
    "solve_care",
    "tilt_pid",
]
