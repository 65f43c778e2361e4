"""Flat ``section.key = value`` configuration files.

Every key has a default in the packaged ``data/default.cfg``; a user file
overrides any subset.  Values are Python literals read with
:func:`ast.literal_eval`.
"""
from __future__ import annotations

import ast
import hashlib
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .control.lqr import LQRWeights
from .control.pid import PIDGains
from .errors import ParseError, ValidationError
from .phases import PhaseSchedule
from .vehicle import AeroParams, VehicleParams


@dataclass(frozen=True)
class PlanConfig:
    alpha_start: float = 0.15
    alpha_cruise: float | None = None
    lift_fraction: float = 0.8
    v_knee: float = 10.0
    dv: float = 0.25
    rank_rtol: float = 1e-10


@dataclass(frozen=True)
class SimOptions:
    decimate: int = 10
    max_position: float = 1e4
    max_rate: float = 100.0
    strict_allocation: bool = False


@dataclass(frozen=True)
class ReportConfig:
    window: float = 10.0
    tol_speed: float = 0.5
    tol_pitch: float = 0.05
    tol_chi: float = 0.02
    tol_altitude: float = 0.1


@dataclass(frozen=True, eq=False)
class SimConfig:
    vehicle: VehicleParams
    schedule: PhaseSchedule
    plan: PlanConfig
    hover_weights: LQRWeights
    cruise_weights: LQRWeights
    attitude_gains: PIDGains
    attitude_tau_f: float
    tilt_gains: PIDGains
    tilt_inertia_scaled: bool
    tilt_ref_tau: float | None
    sim: SimOptions
    report: ReportConfig
    values: dict

    @property
    def aero(self) -> AeroParams:
        return self.vehicle.aero

    def digest(self) -> str:
        return config_hash(self.values)


def default_config_text() -> str:
    return resources.files("quadlink").joinpath("data/default.cfg").read_text(encoding="utf-8")


def parse_text(text: str, known: set[str] | None = None) -> dict:
    """Parse config text into ``{dotted_key: value}``.

    Raises
    ------
    ParseError
        Malformed line, duplicate key, unknown key, or invalid literal.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected `section.key = value`", line=lineno)
        key, _, rhs = line.partition("=")
        key = key.strip()
        rhs = rhs.strip()
        if key.count(".") != 1 or not all(part.isidentifier() for part in key.split(".")):
            raise ParseError("key must look like `section.key`", line=lineno, key=key)
        if known is not None and key not in known:
            raise ParseError("unknown key", line=lineno, key=key)
        if key in values:
            raise ParseError("duplicate key", line=lineno, key=key)
        try:
            values[key] = ast.literal_eval(rhs)
        except (ValueError, SyntaxError) as exc:
            raise ParseError(f"cannot read value {rhs!r}", line=lineno, key=key) from exc
    return values


def default_values() -> dict:
    return parse_text(default_config_text())


def config_hash(values: dict) -> str:
    canon = "\n".join(f"{k}={values[k]!r}" for k in sorted(values))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _num(values, key, errors):
    v = values[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        errors.append((key, f"must be a number, got {v!r}"))
        return math.nan
    return float(v)


def build_config(values: dict) -> SimConfig:
    """Assemble and validate a :class:`SimConfig`.

    Raises
    ------
    ValidationError
        Lists every violated invariant at once.
    """
    errors: list[tuple[str, str]] = []

    def num(key):
        return _num(values, key, errors)

    def seq(key, n=None):
        v = values[key]
        try:
            a = np.asarray(v, dtype=float)
        except (TypeError, ValueError):
            errors.append((key, f"must be numeric, got {v!r}"))
            return None
        if n is not None and a.shape != (n,):
            errors.append((key, f"must have {n} entries"))
            return None
        return a

    def mat(key):
        a = seq(key)
        if a is None:
            return np.full((1, 1), np.nan)
        if a.ndim == 1:
            return np.diag(a)
        if a.ndim != 2:
            errors.append((key, "must be a list or a matrix"))
            return np.full((1, 1), np.nan)
        return a

    J = mat("vehicle.J")
    if J.shape != (3, 3):
        errors.append(("vehicle.J", "must be 3x3 or a 3-entry diagonal"))
        J = np.full((3, 3), np.nan)
    cl = seq("aero.cl_poly")
    cd = seq("aero.cd_poly")
    aero = AeroParams(
        num("aero.rho"),
        num("aero.S"),
        tuple(cl.tolist()) if cl is not None and cl.ndim == 1 else (),
        tuple(cd.tolist()) if cd is not None and cd.ndim == 1 else (),
    )
    vehicle = VehicleParams(
        m=num("vehicle.m"),
        J=J,
        J_link=num("vehicle.J_link"),
        l_f=num("vehicle.l_f"),
        l_fw=num("vehicle.l_fw"),
        l_fh=num("vehicle.l_fh"),
        l_b=num("vehicle.l_b"),
        l_bw=num("vehicle.l_bw"),
        kappa=num("vehicle.kappa"),
        g=num("vehicle.g"),
        aero=aero,
        f_max=num("vehicle.f_max"),
    )
    errors.extend(vehicle.validate())

    schedule = PhaseSchedule(**{k: num(f"schedule.{k}") for k in PhaseSchedule.__dataclass_fields__})
    errors.extend(schedule.validate())

    ac = values["plan.alpha_cruise"]
    if ac is not None:
        ac = num("plan.alpha_cruise")
    plan = PlanConfig(
        alpha_start=num("plan.alpha_start"),
        alpha_cruise=ac,
        lift_fraction=num("plan.lift_fraction"),
        v_knee=num("plan.v_knee"),
        dv=num("plan.dv"),
        rank_rtol=num("plan.rank_rtol"),
    )
    if not plan.dv > 0:
        errors.append(("plan.dv", "must be > 0"))
    if not plan.v_knee >= 0:
        errors.append(("plan.v_knee", "must be >= 0"))
    if not 0 < plan.lift_fraction:
        errors.append(("plan.lift_fraction", "must be > 0"))
    if not 0 < plan.rank_rtol < 1:
        errors.append(("plan.rank_rtol", "must lie in (0, 1)"))

    hover_w = LQRWeights(mat("lqr.Q_hover"), mat("lqr.R_hover"))
    cruise_w = LQRWeights(mat("lqr.Q_cruise"), mat("lqr.R_cruise"))
    errors.extend(hover_w.validate("lqr.Q_hover", "lqr.R_hover", 9, 4))
    errors.extend(cruise_w.validate("lqr.Q_cruise", "lqr.R_cruise", 9, 5))

    def gains(key, limit_key):
        a = seq(key, 3)
        if a is None:
            a = np.full(3, np.nan)
        g = PIDGains(float(a[0]), float(a[1]), float(a[2]), num(limit_key))
        errors.extend(g.validate(key))
        return g

    att = gains("pid.attitude", "pid.attitude_i_limit")
    tilt = gains("pid.tilt", "pid.tilt_i_limit")
    tau_f = num("pid.attitude_tau_f")
    if not tau_f >= 0:
        errors.append(("pid.attitude_tau_f", "must be >= 0"))
    scaled = values["pid.tilt_inertia_scaled"]
    if not isinstance(scaled, bool):
        errors.append(("pid.tilt_inertia_scaled", "must be True or False"))
    ref_tau = values["pid.tilt_ref_tau"]
    if ref_tau is not None:
        ref_tau = num("pid.tilt_ref_tau")
        if not ref_tau >= 0:
            errors.append(("pid.tilt_ref_tau", "must be >= 0 or None"))

    dec = values["sim.decimate"]
    if isinstance(dec, bool) or not isinstance(dec, int) or dec < 1:
        errors.append(("sim.decimate", f"must be an integer >= 1, got {dec!r}"))
        dec = 1
    strict = values["sim.strict_allocation"]
    if not isinstance(strict, bool):
        errors.append(("sim.strict_allocation", "must be True or False"))
        strict = False
    sim = SimOptions(dec, num("sim.max_position"), num("sim.max_rate"), strict)
    if not sim.max_position > 0:
        errors.append(("sim.max_position", "must be > 0"))
    if not sim.max_rate > 0:
        errors.append(("sim.max_rate", "must be > 0"))

    report = ReportConfig(**{k: num(f"report.{k}") for k in ReportConfig.__dataclass_fields__})
    for k in ReportConfig.__dataclass_fields__:
        if not getattr(report, k) > 0:
            errors.append((f"report.{k}", "must be > 0"))

    if errors:
        raise ValidationError(errors)
    return SimConfig(
        vehicle, schedule, plan, hover_w, cruise_w, att, tau_f, tilt, scaled, ref_tau, sim, report, dict(values)
    )


def load_config(text: str = "", overrides: dict | None = None) -> SimConfig:
    """Defaults, then ``text``, then ``overrides``."""
    values = default_values()
    values.update(parse_text(text, known=set(values)))
    if overrides:
        unknown = set(overrides) - set(values)
        if unknown:
            raise ParseError("unknown key", key=sorted(unknown)[0])
        values.update(overrides)
    return build_config(values)


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> SimConfig:
    """Read a config file (``None`` means defaults only).

    Raises
    ------
    ParseError
        Syntax problems, reported with line and key.
    ValidationError
        All violated invariants.
    """
    text = "" if path is None else Path(path).read_text(encoding="utf-8")
    return load_config(text, overrides)


def format_values(values: dict) -> str:
    return "".join(f"{k} = {values[k]!r}\n" for k in sorted(values))
