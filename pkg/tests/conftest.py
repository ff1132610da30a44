import pytest

from etfbounds import frames as fr

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def sic_qubit():
    result = fr.optimize_etf(2, 4, seed=0)
    assert result.success
    return result.frame


@pytest.fixture(scope="session")
def sic_qutrit():
    result = fr.optimize_etf(3, 9, seed=0)
    assert result.success
    return result.frame


@pytest.fixture(scope="session")
def frame_zoo(sic_qubit, sic_qutrit):
    """Every frame family the acceptance criteria name, keyed by label."""
    zoo = {"basis-4": fr.orthonormal_basis_frame(4)}
    for d in range(2, 7):
        zoo[f"simplex-{d}"] = fr.simplex_etf(d)
    zoo["optimized-2-4"] = sic_qubit
    zoo["optimized-3-9"] = sic_qutrit
    zoo["complement-2-4"] = fr.naimark_complement(sic_qubit)
    return zoo


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
