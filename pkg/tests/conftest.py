import numpy as np
import pytest

from awlift.mapspec import make_spec


def enneper(r: float = 1.0):
    return make_spec(f"{r}*z", f"({r}*z)^3/3", f"{r}*z", label=f"Enneper r={r}")


def power(alpha: float):
    return make_spec(f"((1+z)/(1-z))^{alpha}", label=f"power {alpha}")


@pytest.fixture(scope="session")
def identity():
    return make_spec("z", label="identity")


@pytest.fixture(scope="session")
def atanh_map():
    return make_spec("atanh(z)", label="atanh")


@pytest.fixture(scope="session")
def power08():
    return power(0.8)


@pytest.fixture(scope="session")
def enneper05():
    return enneper(0.5)


@pytest.fixture(scope="session")
def enneper1():
    return enneper(1.0)


@pytest.fixture(scope="session")
def quad_q():
    return make_spec("z", q="0.5*z^2", label="h=z, q=z^2/2")


def random_disk(n: int, seed: int, radius: float = 0.9) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return radius * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


# PASS/FAIL lines from the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
