"""Shared fixtures: canonical small models used across the suite."""

import numpy as np
import pytest

from heomspectra import BathSpec, BathTerm, custom, qubit_operators


def make_qubit_decay(amplitude=0.2, omega_q=1.0, frequency=0.5, kappa=1.0):
    """Qubit with H = (omega_q / 2) sigma_z decaying through sigma_minus."""
    ops = qubit_operators()
    bath = BathSpec(ops["sigma_minus"], (BathTerm(amplitude, frequency, kappa),))
    return custom(
        0.5 * omega_q * ops["sigma_z"],
        [bath],
        name="qubit_decay",
        params={"amplitude": amplitude, "omega_q": omega_q,
                "frequency": frequency, "kappa": kappa},
    )


@pytest.fixture
def qubit_decay_model():
    return make_qubit_decay()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(rng, n):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (m + m.conj().T) / 2


def random_density(rng, n):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def multiset_distance(a, b):
    """Hausdorff-style distance between two eigenvalue multisets."""
    from scipy.spatial import cKDTree

    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ta = np.column_stack((a.real, a.imag))
    tb = np.column_stack((b.real, b.imag))
    d1, _ = cKDTree(tb).query(ta)
    d2, _ = cKDTree(ta).query(tb)
    return max(float(d1.max()), float(d2.max()))
