import random
from fractions import Fraction

import pytest

from halfint import fixtures
from halfint.algebra import QQ, NumberField
from halfint.qseries import QExpansion

QB = NumberField([-4, -1, 1], "b")

_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        n, text = mark.args
        entry = _criteria.setdefault(n, [text, True, []])
        if not report.passed:
            entry[1] = False
            entry[2].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, ok, failed = _criteria[n]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}"
        if failed:
            line += f"  (failed: {', '.join(failed)})"
        terminalreporter.write_line(line)


@pytest.fixture
def qb():
    return QB


@pytest.fixture(scope="session")
def fx():
    return {name: fixtures.load(name) for name in fixtures.names()}


def random_rational(rng: random.Random, size=9):
    num = rng.randint(-size, size)
    den = rng.randint(1, size)
    return Fraction(num, den)


def random_element(rng: random.Random, K=QQ, size=9):
    return K.from_coeffs([random_rational(rng, size) for _ in range(K.degree)])


def random_nonzero(rng, K=QQ, size=9):
    while True:
        x = random_element(rng, K, size)
        if x:
            return x


def random_sparse_series(rng: random.Random, prec, K=QQ, density=0.3, first=0):
    vals = [random_element(rng, K) if rng.random() < density else K.zero
            for _ in range(first, prec)]
    return QExpansion.from_list(vals, prec=prec, first=first, field=K)
