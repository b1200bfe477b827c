import numpy as np
import pytest

from qhydro import Grid1D, Harmonic, Params, load_scenario, oscillator_eigenstate
from qhydro.scenario import bundled_path, run_scenario

_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record a criterion result; lines are printed in the terminal summary."""
    def record(number, ok, detail):
        _ACCEPTANCE.append((number, bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def grid():
    return Grid1D(-20.0, 20.0, 801)


@pytest.fixture(scope="session")
def osc():
    return Params(potential=Harmonic(0.02))


@pytest.fixture(scope="session")
def ground(grid, osc):
    return oscillator_eigenstate(0, grid, osc)


@pytest.fixture(scope="session")
def scenario_runs():
    """The three bundled scenarios, run once per session."""
    return {name: run_scenario(load_scenario(bundled_path(name)))
            for name in ("paper-k1", "paper-k0.1", "paper-k0")}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
