import random

import pytest

from adelekit import GF, P1, QQ, SpecZ


@pytest.fixture(scope="session")
def X():
    return P1(GF(5))


@pytest.fixture(scope="session")
def XQ():
    return P1(QQ)


@pytest.fixture(scope="session")
def Z():
    return SpecZ()


@pytest.fixture
def rng():
    return random.Random(1234)


_ACCEPTANCE: dict = {}


def record(num, title, passed, seconds, budget, detail=""):
    _ACCEPTANCE[num] = (title, passed, seconds, budget)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        title, passed, secs, budget = _ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {num}. {title} ({secs:.2f}s < {budget}s)")
