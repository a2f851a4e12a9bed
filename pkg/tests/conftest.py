import functools

import pytest

from fsrgrowth.expansion import ExpansionTower, primary_seed
from fsrgrowth.rules import builtin, make_rpq

_ACCEPTANCE = []


def record(criterion: str, passed: bool, detail: str = "") -> bool:
    _ACCEPTANCE.append((criterion, passed, detail))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {criterion}: {detail}")


@functools.lru_cache(maxsize=None)
def rule_named(name: str):
    if name.startswith("rpq"):
        _, p, q = name.split("_")
        return make_rpq(int(p), int(q))
    return builtin(name)


@functools.lru_cache(maxsize=None)
def tower_for(name: str) -> ExpansionTower:
    r = rule_named(name)
    return ExpansionTower(r, primary_seed(r))


@pytest.fixture
def towers():
    return tower_for
