import numpy as np
import pytest

from resdecay.delta_shell import ShellPotential
from resdecay.resonant_basis import InitialState, ResonantBasis
from resdecay.single_particle import Expansion

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def shell():
    return ShellPotential(6.0, 1.0)


@pytest.fixture(scope="session")
def basis50(shell):
    return ResonantBasis.build(shell, 50)


@pytest.fixture(scope="session")
def basis200(shell):
    return ResonantBasis.build(shell, 200)


@pytest.fixture(scope="session")
def ground(basis200):
    return Expansion.build(basis200, InitialState.box(1))


@pytest.fixture(scope="session")
def tau1(basis50):
    return basis50.poles.lifetime


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
