import pytest
from hypothesis import settings

from kmvertex.roots import parse_algebra
from kmvertex.vertex import Site, site_config

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    def log(number, passed: bool, summary: str) -> str:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {summary}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return line

    return log


@pytest.fixture(scope="session")
def a1():
    return parse_algebra("A1")


@pytest.fixture(scope="session")
def a1_site(a1):
    return Site(site_config(a1, level=4, window=2, modes=2))


@pytest.fixture(scope="session")
def a1_small_site(a1):
    return Site(site_config(a1, level=3, window=2, modes=2))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
