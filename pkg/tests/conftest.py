import numpy as np
import pytest

from zenolike.model import ModelParams, QubitState


def random_bloch(rng, radius=None):
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    r = rng.uniform() ** (1 / 3) if radius is None else radius
    return r * v


def random_state(rng):
    return QubitState.from_bloch(random_bloch(rng))


def random_params(rng, g=(0.05, 3.0), dtf=(0.0, 20.0), dtm=(0.0, 20.0)):
    return ModelParams(rng.uniform(*g), rng.uniform(*dtf), rng.uniform(*dtm))


def random_matrix(rng, n=4):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def random_hermitian(rng, n=4):
    a = random_matrix(rng, n)
    return 0.5 * (a + a.conj().T)


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_matrix(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus(rng, rank=3):
    """Random CPTP Kraus set from an isometry."""
    v = random_unitary(rng, 2 * rank)[:, :2]
    return [v[2 * k:2 * k + 2, :] for k in range(rank)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
