import pytest

from varwave import CoefficientProfile, RationalPeriod, SpectralSpace, solve_eigenbasis

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def unit_basis():
    return solve_eigenbasis(CoefficientProfile.constant(1.0), 10)


@pytest.fixture(scope="session")
def period21():
    return RationalPeriod(2, 1)


@pytest.fixture(scope="session")
def small_space(unit_basis, period21):
    return SpectralSpace(15, 10).fit(unit_basis, period21)


@pytest.fixture(scope="session")
def bumpy_space(period21):
    prof = CoefficientProfile.exponential(0.7)
    return SpectralSpace(9, 8).fit(solve_eigenbasis(prof, 8), period21)
