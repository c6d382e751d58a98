import numpy as np
import pytest

from excitonspec import (
    DensityMatrix,
    NotHermitianError,
    NotPositiveError,
    TraceNotOneError,
    adjoint,
    commutator,
    expectation,
    validate_density,
)

KET_G = np.array([1.0, 0.0])
KET_E = np.array([0.0, 1.0])


def outer(a, b):
    return np.outer(a, b.conj()).astype(complex)


class TestCommutator:
    def test_sigma_x_with_ground_projector(self):
        sx = outer(KET_E, KET_G) + outer(KET_G, KET_E)
        expected = outer(KET_E, KET_G) - outer(KET_G, KET_E)
        assert np.array_equal(commutator(sx, outer(KET_G, KET_G)), expected)

    def test_identity_commutes(self):
        rng = np.random.default_rng(3)
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert np.array_equal(commutator(np.eye(3), b), np.zeros((3, 3)))

    def test_diagonal_with_raising(self):
        a = np.diag([1.0, 2.0])
        b = outer(KET_E, KET_G)
        assert np.allclose(commutator(a, b), b)

    def test_self_commutator_is_zero(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            assert np.array_equal(commutator(a, a), np.zeros((4, 4)))

    def test_antisymmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            assert np.allclose(commutator(a, b), -commutator(b, a), atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            commutator(np.eye(2), np.eye(3))


class TestExpectation:
    def test_identity_gives_trace(self):
        rho = validate_density(np.diag([0.25, 0.75]))
        assert expectation(np.eye(2), rho) == pytest.approx(1.0)

    def test_orthogonal_projectors(self):
        assert expectation(outer(KET_E, KET_E), outer(KET_G, KET_G)) == 0

    def test_dipole_on_coherent_superposition(self):
        # brute-force 2x2 product: Tr(sx @ |+><+|) with |+> = (|g>+|e>)/sqrt(2)
        plus = (KET_G + KET_E) / np.sqrt(2)
        rho = outer(plus, plus)
        sx = outer(KET_E, KET_G) + outer(KET_G, KET_E)
        brute = sum((sx @ rho)[i, i] for i in range(2))
        assert brute == pytest.approx(1.0)
        assert expectation(sx, rho) == pytest.approx(brute)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            expectation(np.eye(3), np.eye(2) / 2)


class TestAdjoint:
    def test_real_symmetric_fixed_point(self):
        a = np.array([[1.0, 2.0], [2.0, 5.0]])
        assert np.array_equal(adjoint(a), a)

    def test_imaginary_identity(self):
        assert np.array_equal(adjoint(1j * np.eye(2)), -1j * np.eye(2))

    def test_product_rule(self):
        rng = np.random.default_rng(6)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert np.allclose(adjoint(a @ b), adjoint(b) @ adjoint(a), atol=1e-14)

    def test_involution(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        assert np.array_equal(adjoint(adjoint(a)), a)


class TestValidateDensity:
    def test_valid_mixed_state(self):
        dm = validate_density(np.diag([0.5, 0.5]))
        assert isinstance(dm, DensityMatrix)
        assert dm.dim == 2

    def test_negative_population_rejected(self):
        with pytest.raises(NotPositiveError) as err:
            validate_density(np.diag([1.5, -0.5]))
        assert err.value.min_eigenvalue == pytest.approx(-0.5)

    def test_non_hermitian_rejected(self):
        rho = np.diag([1.0, 0.0]).astype(complex)
        rho[1, 0] = 0.1
        with pytest.raises(NotHermitianError) as err:
            validate_density(rho)
        assert err.value.deviation == pytest.approx(0.1)

    def test_wrong_trace_rejected(self):
        with pytest.raises(TraceNotOneError) as err:
            validate_density(np.diag([0.7, 0.7]))
        assert err.value.deviation == pytest.approx(0.4)

    def test_expectation_of_identity_for_random_states(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            dim = int(rng.integers(2, 6))
            a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            rho = a @ a.conj().T
            rho /= np.trace(rho).real
            dm = validate_density(rho)
            assert abs(expectation(np.eye(dim), dm) - 1.0) < dm.tol

    def test_matrix_is_frozen(self):
        dm = validate_density(np.diag([0.5, 0.5]))
        with pytest.raises(ValueError):
            dm.matrix[0, 0] = 2.0

    def test_nonfinite_rejected(self):
        bad = np.diag([np.inf, 0.0])
        with pytest.raises(ValueError, match="finite"):
            validate_density(bad)
