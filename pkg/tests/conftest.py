import numpy as np
import pytest

from compfix.bridge import MockCompiler
from compfix.bundle import train_bundle
from compfix.corpus import mine_corpus
from compfix.synth import generate_buggy


@pytest.fixture(scope="session")
def bridge():
    return MockCompiler()


@pytest.fixture(scope="session")
def buggy(bridge):
    return generate_buggy(600, seed=1, bridge=bridge)


@pytest.fixture(scope="session")
def mined(buggy):
    return mine_corpus([b.pair for b in buggy])


@pytest.fixture(scope="session")
def bundle(mined):
    return train_bundle(mined)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE: list = []


@pytest.fixture
def acceptance():
    def record(number, ok, detail):
        ACCEPTANCE.append((number, ok, detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
