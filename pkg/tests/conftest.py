import math

import pytest

from netinfer.cascades import Cascade, CascadeSet

_ACCEPTANCE = []


def record(number, name, ok, detail=""):
    _ACCEPTANCE.append((number, name, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(_ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {name}: {detail}")


def make_set(*orders):
    """CascadeSet from node orderings; the i-th node gets time i."""
    return CascadeSet.from_cascades(
        Cascade(tuple((node, float(t)) for t, node in enumerate(order))) for order in orders)


def as_pairs(cs):
    return [list(c.entries) for c in cs.cascades]


@pytest.fixture
def chain_set():
    return make_set([0, 1, 2])


INF = math.inf
