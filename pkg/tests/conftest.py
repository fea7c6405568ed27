import random

import pytest

from zkpol.bench import random_certificate
from zkpol.curve import get_engine
from zkpol.hashing import AlgebraicHashParams
from zkpol.protocol import CrsBundle


@pytest.fixture(scope="session")
def engine():
    return get_engine("oracle")


@pytest.fixture(scope="session")
def fr(engine):
    return engine.fr


@pytest.fixture(scope="session")
def params(engine):
    return AlgebraicHashParams.for_engine(engine)


@pytest.fixture(scope="session")
def crs(engine):
    return CrsBundle.generate(engine, [1, 2, 3, 4], random.Random("tests:crs"))


@pytest.fixture
def make_cert(engine):
    def make(seed):
        return random_certificate(engine, random.Random(seed))
    return make


# acceptance lines, printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance_report():
    def record(number: int, title: str, passed: bool, detail: str) -> str:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
