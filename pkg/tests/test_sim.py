import numpy as np
import pytest

from quadlink.config import load_config
from quadlink.errors import Diverged, OutOfRange
from quadlink.phases import Phase, PhaseSchedule, phase_at
from quadlink.sim import LOG_COLUMNS, check_cruise_convergence, report_for, run_simulation
from quadlink.trim import solve_chi, trim_state


@pytest.mark.parametrize(
    "t, phase",
    [(0.0, Phase.HOVERING), (10.0, Phase.HOVERING), (20.0, Phase.READY), (29.999, Phase.READY),
     (30.0, Phase.ACCELERATION), (50.0, Phase.CRUISE), (55.0, Phase.CRUISE), (80.0, Phase.CRUISE)],
)
def test_phase_at(t, phase):
    assert phase_at(t, PhaseSchedule()) is phase


def test_phase_at_out_of_range():
    with pytest.raises(OutOfRange):
        phase_at(80.5, PhaseSchedule())
    with pytest.raises(OutOfRange):
        phase_at(-0.1, PhaseSchedule())


def test_hover_only_run(config, reference):
    r = run_simulation(config, reference, t_stop=20.0)
    last = r.array()[-1]
    col = {n: i for i, n in enumerate(LOG_COLUMNS)}
    assert abs(last[col["z"]] + 5.0) < 0.05
    assert np.linalg.norm(last[[col["vx"], col["vy"], col["vz"]]]) < 0.05
    assert r.saturation_count == 0


def test_log_layout_and_decimation(config, reference):
    r = run_simulation(config, reference, t_stop=1.0)
    a = r.array()
    assert a.shape == (101, 26) and len(LOG_COLUMNS) == 26
    assert np.allclose(a[:, 0], np.arange(101) * 0.01)
    coarse = run_simulation(load_config("sim.decimate = 100"), reference, t_stop=1.0)
    assert coarse.array().shape[0] == 11
    assert np.array_equal(coarse.array(), a[::10])


def test_runs_are_deterministic(config, reference):
    a = run_simulation(config, reference, t_stop=3.0).array()
    b = run_simulation(config, reference, t_stop=3.0).array()
    assert np.array_equal(a, b)


@pytest.fixture(scope="module")
def trimmed_cruise(config, reference):
    alpha = reference.alpha_policy(20.0)
    chi = solve_chi(20.0, alpha, config.vehicle)
    state0 = trim_state(20.0, alpha, chi, z=-5.0)
    return run_simulation(config, reference, state0=state0, t_start=70.0)


def test_exact_trim_cruise_is_stationary(trimmed_cruise, config):
    rep = check_cruise_convergence(trimmed_cruise, 20.0, -5.0)
    assert rep.ok
    assert max(rep.speed_error, rep.pitch_error, rep.chi_error, rep.altitude_error) < 1e-6
    assert trimmed_cruise.saturation_count == 0
    assert report_for(trimmed_cruise, config).ok


def test_convergence_report_detects_offsets(trimmed_cruise):
    a = trimmed_cruise.array().copy()
    a[-1, LOG_COLUMNS.index("z")] += 0.2
    rep = check_cruise_convergence(a, 20.0, -5.0)
    assert not rep.checks["altitude"][2] and rep.checks["speed"][2]
    assert "FAIL" in rep.format()


def test_convergence_report_preconditions(trimmed_cruise):
    with pytest.raises(ValueError):
        check_cruise_convergence(np.empty((0, 26)), 20.0, -5.0)
    a = trimmed_cruise.array().copy()
    a[:, LOG_COLUMNS.index("phase")] = int(Phase.READY)
    with pytest.raises(ValueError):
        check_cruise_convergence(a, 20.0, -5.0)


def test_coarse_step_diverges_with_time():
    with pytest.raises(Diverged) as exc:
        run_simulation(load_config("schedule.dt = 0.02"))
    assert 0.0 < exc.value.t < 5.0
    assert "t=" in str(exc.value)


@pytest.mark.slow
def test_full_run_reaches_cruise(default_run, config):
    last = default_run.array()[-1]
    col = {n: i for i, n in enumerate(LOG_COLUMNS)}
    assert last[col["t"]] == pytest.approx(80.0)
    assert 19.5 <= last[col["vx"]] <= 20.5
    chi_c = solve_chi(20.0, default_run.reference.alpha_policy(20.0), config.vehicle)
    assert abs(last[col["chi"]] - chi_c) < 0.02
    assert report_for(default_run, config).ok


@pytest.mark.slow
def test_phase_invariants(default_run, config):
    a = default_run.array()
    col = {n: i for i, n in enumerate(LOG_COLUMNS)}
    t, phase = a[:, col["t"]], a[:, col["phase"]]
    hover = phase == int(Phase.HOVERING)
    assert np.max(np.abs(a[hover, col["chi"]])) < 0.01
    end_ready = np.flatnonzero(phase == int(Phase.READY))[-1]
    assert np.linalg.norm(a[end_ready, [col["x"], col["y"], col["z"]]] - [0.0, 0.0, -5.0]) < 0.2
    accel = phase == int(Phase.ACCELERATION)
    pitch = np.max(np.abs(a[accel, col["theta"]] - a[accel, col["alpha_ref"]]))
    tilt = np.max(np.abs(a[accel, col["chi"]] - a[accel, col["chi_nom"]]))
    assert pitch < tilt
    assert default_run.saturation_count == 0
