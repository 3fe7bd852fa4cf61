import numpy as np
import pytest

from selcand.core import BudgetCounter, Problem, make_rng
from selcand.bench.functions import rastrigin, sphere


def make_problem(fn=sphere, dim=5, bound=5.0, name="test"):
    return Problem(name, dim, -bound, bound, fn, 0.0)


@pytest.fixture
def sphere5():
    return make_problem(sphere, 5, 100.0, "sphere")


@pytest.fixture
def rastrigin2():
    return make_problem(rastrigin, 2, 5.12, "rastrigin")


@pytest.fixture
def rng():
    return make_rng(1234)


def fresh_budget(problem, limit=None):
    return BudgetCounter(problem, limit)


def naive_distance(a, b):
    total = 0.0
    for x, y in zip(a, b):
        total += (x - y) * (x - y)
    return total ** 0.5


@pytest.fixture
def np_rng():
    return np.random.default_rng(99)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
