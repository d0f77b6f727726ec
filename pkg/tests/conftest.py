import numpy as np
import pytest

from leech import LeechData

S2 = np.sqrt(2)


def example_data(b2=0.5):
    """Constant ``G = [1 1]/sqrt 2`` and ``K = b2 z``."""
    return LeechData(A=[[0]], B1=[[0, 0]], B2=[[b2]], C=[[1]], D1=[[1 / S2, 1 / S2]], D2=[[0]])


@pytest.fixture
def ex6():
    return example_data(0.5)


@pytest.fixture
def ex_zero_symbol():
    return example_data(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_unitary(rng, r):
    Z = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
