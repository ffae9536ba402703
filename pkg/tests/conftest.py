import numpy as np
import pytest

from volrisk import data_path
from volrisk.synthetic import simulate_market


@pytest.fixture(scope="session")
def fixture_paths():
    return data_path("synthetic_prices.csv"), data_path("synthetic_rates.csv")


@pytest.fixture
def small_market():
    """300 days of model-generated price and volume."""
    return simulate_market(300, mu=0.10, sigma=0.2, psi=0.04, eta=3.0, rho=0.3, seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    lines = [
        value
        for key in ("passed", "failed")
        for rep in terminalreporter.stats.get(key, [])
        if rep.when == "call"
        for name, value in rep.user_properties
        if name == "acceptance"
    ]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
