import numpy as np
import pytest

from elastica.branch import trace_branch
from elastica.shooting import BranchLabel, solve_all

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def sols60():
    """The three equilibria at b = 60 keyed by label."""
    return {s.branch_label: s for s in solve_all(60.0)}


@pytest.fixture(scope="session")
def curled(sols60):
    return sols60[BranchLabel.SECONDARY_LOWER]


@pytest.fixture(scope="session")
def mixed(sols60):
    return sols60[BranchLabel.SECONDARY_UPPER]


@pytest.fixture(scope="session")
def primary60(sols60):
    return sols60[BranchLabel.PRIMARY]


@pytest.fixture(scope="session")
def primary_branch():
    """Primary branch from b = 1 to 60 in steps of 0.5."""
    seed = solve_all(1.0)[0]
    return trace_branch(seed, 60.0, 0.5)


@pytest.fixture(scope="session")
def primary_by_b(primary_branch):
    return {round(p.b, 6): p for p in primary_branch.points}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
