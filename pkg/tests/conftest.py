import pytest

from simonscone import ConeParams, OrbitControls, generate_sigma

PAIRS = [(2, 1), (3, 1), (3, 2), (4, 2), (7, 3)]
LONG = OrbitControls(rho_span=30.0)


@pytest.fixture(scope="session")
def sigma_curves():
    """Sigma_{n,p,+/-} for the five reference cones, with the default controls."""
    return {(n, p, s): generate_sigma(ConeParams(n, p), s) for n, p in PAIRS for s in "+-"}


@pytest.fixture(scope="session")
def long_curves():
    """Same surfaces integrated over 30 units of log-radius (for decay fits)."""
    return {(n, p, s): generate_sigma(ConeParams(n, p), s, LONG) for n, p in PAIRS for s in "+-"}


# acceptance lines, printed after the run by the hook below
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
