import pytest

from carleman import geometry, ortho


@pytest.fixture(scope="session")
def lem():
    return geometry.lemniscate(3, 1.4)


@pytest.fixture(scope="session")
def disk2():
    return geometry.disk(2.0)


@pytest.fixture(scope="session")
def chol30(lem):
    return ortho.gram_cholesky_orthonormalize(lem, 30, 256)


@pytest.fixture(scope="session")
def chol61(lem):
    return ortho.gram_cholesky_orthonormalize(lem, 61, 384)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
