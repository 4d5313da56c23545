import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_complex_matrix(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_hermitian(rng, n):
    a = random_complex_matrix(rng, n, n)
    return (a + a.conj().T) / 2.0


def random_density(rng, n, rank=None):
    rank = rank or n
    a = random_complex_matrix(rng, n, rank)
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_complex_matrix(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def strip_global_phase(v):
    """Rotate a ket so its largest-magnitude entry is real positive."""
    v = np.asarray(v)
    k = int(np.argmax(np.abs(v)))
    return v * np.conj(v[k]) / abs(v[k])
