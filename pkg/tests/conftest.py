import pytest

from fpdsynth import cmatrix
from fpdsynth.prototype import preset
from fpdsynth.synthesis import PAPER_SPEC, build_coupling_plan


@pytest.fixture(scope="session")
def paper_g():
    return preset("paper-3rd-order-20dB")


@pytest.fixture(scope="session")
def paper_plan(paper_g):
    return build_coupling_plan(PAPER_SPEC, paper_g)


@pytest.fixture(scope="session")
def paper_ncm(paper_plan):
    return cmatrix.normalize(paper_plan, PAPER_SPEC)


@pytest.fixture(scope="session")
def paper_sweep(paper_ncm):
    return cmatrix.sweep(paper_ncm, cmatrix.default_grid())


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
