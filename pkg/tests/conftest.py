import numpy as np
import pytest

from excitonspec import (
    DephasingModel,
    DimerParams,
    ExcitonModel,
    build_dimer,
    eigenstate,
)


@pytest.fixture
def tls():
    """Two-level system with gap 3 and a sigma-x dipole."""
    return ExcitonModel(
        h0=np.diag([0.0, 3.0]).astype(complex),
        mu=np.array([[0, 1], [1, 0]], dtype=complex),
        labels=("g", "e"),
        parity=(1, -1),
    )


@pytest.fixture
def dimer():
    return build_dimer(DimerParams(10.0, 9.0, 0.5, 1.0, 0.8))


@pytest.fixture
def dimer_ground(dimer):
    return eigenstate(dimer, "g")


@pytest.fixture
def no_noise():
    def make(dim):
        return DephasingModel.none(dim)

    return make


def random_density(rng, dim):
    """Random full-rank valid density matrix."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T + 0.1 * np.eye(dim)
    return rho / np.trace(rho).real
