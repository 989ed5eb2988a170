import os

import pytest

from heraklit.dsl import parse_file

MODELS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "models")


def model_path(name):
    return os.path.join(MODELS, name)


@pytest.fixture(scope="session")
def restaurant():
    return parse_file(model_path("restaurant.hkt"))


@pytest.fixture(scope="session")
def restaurant2():
    return parse_file(model_path("restaurant2.hkt"))


ACCEPTANCE = []


def record_criterion(number, title, ok, seconds, limit, note=""):
    """Print one pass/fail line and keep it for the terminal summary."""
    ok = ok and seconds < limit
    line = (f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} "
            f"({seconds:.2f}s, limit {limit}s){' - ' + note if note else ''}")
    print(line)
    ACCEPTANCE.append(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
