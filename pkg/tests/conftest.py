from pathlib import Path

import pytest

from freebits.latdict import builtin_profile, generate_dict
from freebits.netmodel import FULL_SET, load_network

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def golden_dir():
    return GOLDEN


@pytest.fixture(scope="session")
def mnv1_4b():
    return load_network(DATA / "mnv1_4b4b.json")


@pytest.fixture(scope="session")
def mnv1_8b():
    return load_network(DATA / "mnv1_8b8b.json")


@pytest.fixture(scope="session")
def nnv1_dict(mnv1_8b):
    return generate_dict(builtin_profile("xpulpnnv1"), mnv1_8b, FULL_SET)


# acceptance summary: one PASS/FAIL line per criterion
_ACCEPTANCE = []


def record_criterion(name, passed):
    _ACCEPTANCE.append((name, passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
