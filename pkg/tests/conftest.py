import pytest

from stationary_discs.polyalgebra import sum_of_powers, validate_hermitian


@pytest.fixture
def quartic():
    return sum_of_powers(1, 4)


@pytest.fixture
def quartic_pair():
    return sum_of_powers(2, 4)


@pytest.fixture
def tilted():
    """|z|^4 + 0.3 (z^3 zbar + z zbar^3): admissible, k0 = 3, ind Q = 2."""
    return validate_hermitian({((2,), (2,)): 1, ((3,), (1,)): 0.3, ((1,), (3,)): 0.3}, (1,))


@pytest.fixture
def degenerate():
    return validate_hermitian({((3,), (1,)): 1, ((1,), (3,)): 1}, (1,))


@pytest.fixture
def weighted():
    return validate_hermitian({((2, 0), (2, 0)): 1, ((0, 1), (0, 1)): 1}, (2, 4))


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            for name, value in getattr(rep, "user_properties", []):
                if name == "acceptance":
                    lines.append(value)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
