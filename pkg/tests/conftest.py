import json
import time
from pathlib import Path

import pytest

from quadlink.config import parse_config

ORACLES = json.loads((Path(__file__).parent / "oracles.json").read_text())

_criteria: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = ""
        if report.failed:
            detail = str(report.longrepr.reprcrash.message).splitlines()[0] if hasattr(report.longrepr, "reprcrash") else ""
        _criteria[n] = (title, "PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, status, detail = _criteria[n]
        line = f"criterion {n:2d} {status}  {title}"
        if detail:
            line += f"  ({detail[:150]})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def oracles():
    return ORACLES


@pytest.fixture(scope="session")
def config():
    return parse_config()


@pytest.fixture(scope="session")
def params(config):
    return config.vehicle


@pytest.fixture(scope="session")
def reference(config):
    from quadlink.sim import build_reference

    return build_reference(config)


@pytest.fixture(scope="session")
def default_run(config):
    """Full 80 s transition with the default configuration (shared by several tests).

    ``elapsed`` covers gain scheduling plus the run.
    """
    from quadlink.sim import build_reference, run_simulation

    t0 = time.perf_counter()
    result = run_simulation(config, build_reference(config))
    result.elapsed = time.perf_counter() - t0
    return result
