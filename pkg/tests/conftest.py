import numpy as np
import pytest

from bipartite_thermo.runner import execute
from bipartite_thermo.scenario import load_scenario, resolve_scenario_path

# criterion number -> (title, passed, detail), filled by tests/test_acceptance.py
ACCEPTANCE = {}
ACCEPTANCE_COUNT = 12


def record_acceptance(num, title, passed, detail):
    ACCEPTANCE[num] = (title, bool(passed), detail)
    print(f"criterion {num:2d} {'PASS' if passed else 'FAIL'}: {title} | {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_RUNS = {}


@pytest.fixture(scope="session")
def bundled_run():
    """Execute a bundled scenario once per session and reuse the result."""
    def get(name):
        if name not in _RUNS:
            _RUNS[name] = execute(load_scenario(resolve_scenario_path(name)))
        return _RUNS[name]
    return get


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in range(1, ACCEPTANCE_COUNT + 1):
        if num in ACCEPTANCE:
            title, ok, detail = ACCEPTANCE[num]
            tr.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {title} | {detail}")
        else:
            tr.write_line(f"criterion {num:2d} FAIL: not evaluated (test errored or was deselected)")
    passed = sum(ok for _, ok, _ in ACCEPTANCE.values())
    tr.write_line(f"{passed}/{ACCEPTANCE_COUNT} acceptance criteria pass")
