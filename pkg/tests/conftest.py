import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def random_normal(n, rng, spectrum=None):
    """U diag(z) U* with a Haar unitary U."""
    from cornerrank.linalg import haar_unitary

    if spectrum is None:
        spectrum = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    U = haar_unitary(n, rng)
    return (U * np.asarray(spectrum)) @ U.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for i in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[i])
