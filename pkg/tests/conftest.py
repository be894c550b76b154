import functools

import pytest

from cuspflat.exponents import ExponentPair
from cuspflat.mapping import make_map

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES = {}


@functools.lru_cache(maxsize=None)
def cusp_map(beta, p, q):
    return make_map(beta, ExponentPair(q=q, p=p))


@pytest.fixture
def map222():
    return cusp_map(2, 2, 2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
