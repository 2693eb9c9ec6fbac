import sys
from fractions import Fraction as F

import pytest

from gnedin_fisher import GnedinFisherPsi

# exact (gamma, psi) grid used throughout
PSI_GRID = [(F(1, 2), F(0)), (F(4, 5), F(3, 10)), (F(6, 5), F(1, 2))]
# float grid: gamma in {0.3, 0.8, 1.2} x psi in {0, 0.3, 0.6}, valid pairs only
FLOAT_GRID = [(g, p) for g in (0.3, 0.8, 1.2) for p in (0.0, 0.3, 0.6) if g < p + 1]


@pytest.fixture(params=PSI_GRID, ids=lambda gp: f"g{gp[0]}-p{gp[1]}")
def exact_model(request):
    return GnedinFisherPsi(*request.param)


@pytest.fixture(params=FLOAT_GRID, ids=lambda gp: f"g{gp[0]}-p{gp[1]}")
def float_model(request):
    return GnedinFisherPsi(*request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.format_line(number))
    missing = sorted(set(mod.CRITERIA) - set(mod.RESULTS))
    for number in missing:
        terminalreporter.write_line(f"[FAIL] criterion {number:2d}: {mod.TITLES[number]} (did not complete)")
