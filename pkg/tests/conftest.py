import pytest

from abelfree.cli import load_morphism
from abelfree.words import Morphism


def fixture_morphism(name: str) -> Morphism:
    return load_morphism(name)[0]


@pytest.fixture(scope="session")
def h6():
    return fixture_morphism("h6")


@pytest.fixture(scope="session")
def h8():
    return fixture_morphism("h8")


@pytest.fixture(scope="session")
def g3():
    return fixture_morphism("g3")


@pytest.fixture(scope="session")
def h2():
    return fixture_morphism("h2")


@pytest.fixture(scope="session")
def thue_morse():
    return fixture_morphism("thue_morse")


FIXTURE_MORPHISMS = ["h6", "h8", "h4", "h4p", "f_cassaigne", "thue_morse"]


# one summary line per acceptance criterion, filled in by test_acceptance.py
CRITERIA: dict = {}


def record(number: int, ok: bool, detail: str) -> None:
    prev = CRITERIA.get(number)
    if prev is not None:
        ok = ok and prev[0]
        detail = prev[1] + "; " + detail
    CRITERIA[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
