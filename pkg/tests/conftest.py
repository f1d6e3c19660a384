import numpy as np
import pytest

from volterra_lrd import kernels as K
from volterra_lrd import resolvent as R


@pytest.fixture(scope="session")
def spec03():
    return K.KernelSpec(K.PowerLaw(0.3), -10.0 / 3.0)


@pytest.fixture(scope="session")
def spec15():
    return K.KernelSpec(K.PowerLaw(1.5), -2.0 / 3.0)


@pytest.fixture(scope="session")
def subexp15():
    return K.KernelSpec(K.PowerLaw(1.5), -2.0)


@pytest.fixture(scope="session")
def discrete03():
    return K.KernelSpec(K.PowerTail(0.3), -1.0, K.TimeMode.DISCRETE)


@pytest.fixture(scope="session")
def renewal03(spec03):
    """alpha = 0.3 critical resolvent, h = 0.01 on [0, 100]."""
    return R.solve_resolvent_renewal(spec03, R.Grid.from_horizon(0.01, 100.0))


@pytest.fixture(scope="session")
def long03(spec03):
    """alpha = 0.3 critical resolvent, h = 0.05 on [0, 1e4]."""
    return R.solve_resolvent_renewal(spec03, R.Grid.from_horizon(0.05, 1e4))


@pytest.fixture(scope="session")
def discrete_r03(discrete03):
    """Resolvent of the lam_n = n^-0.3 kernel, n < 1e5, with its k and lam sequences."""
    n = 100_000
    k, lam = K.discrete_sequences(discrete03, n)
    return R.solve_resolvent_discrete(k, discrete03.a, n), k, lam


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: (int(s.split()[1].rstrip("ab")), s.split()[1])):
            terminalreporter.write_line(line)
