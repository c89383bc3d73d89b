"""Tests for the dense tensor kernel."""

import numpy as np
import pytest
import scipy.linalg

from vqcompile.errors import NonHermitianError, ShapeError
from vqcompile.tensorops import (
    PAULI_X,
    TWO_QUBIT_GENERATOR_LABELS,
    contract,
    hermitian_exponential,
    is_unitary,
    svd_truncated,
    two_qubit_generators,
)


class TestContract:
    def test_identity_contraction_returns_matrix(self, rng):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        out = contract(np.eye(4, dtype=complex), m, axes=(1, 0))
        assert np.allclose(out, m, atol=1e-14)

    def test_basis_vector_selects_row(self):
        vec = np.array([1.0, 0.0], dtype=complex)
        flip = np.array([[0, 1], [1, 0]], dtype=complex)
        out = contract(vec, flip, axes=(0, 0))
        assert np.allclose(out, [0.0, 1.0])

    def test_matches_naive_triple_loop(self, rng):
        a = rng.normal(size=(2, 3, 4)) + 1j * rng.normal(size=(2, 3, 4))
        b = rng.normal(size=(4, 5)) + 1j * rng.normal(size=(4, 5))
        out = contract(a, b, axes=(2, 0))
        naive = np.zeros((2, 3, 5), dtype=complex)
        for i in range(2):
            for j in range(3):
                for l in range(5):
                    for k in range(4):
                        naive[i, j, l] += a[i, j, k] * b[k, l]
        assert np.allclose(out, naive, atol=1e-13)

    def test_bilinearity(self, rng):
        a = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
        b = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        alpha = 0.37 - 1.2j
        left = contract(alpha * a, b, axes=(1, 0))
        right = alpha * contract(a, b, axes=(1, 0))
        assert np.allclose(left, right, atol=1e-13)

    def test_extent_mismatch_raises(self):
        with pytest.raises(ShapeError):
            contract(np.zeros((2, 3)), np.zeros((4, 2)), axes=(1, 0))

    def test_axis_out_of_range_raises(self):
        with pytest.raises(ShapeError):
            contract(np.zeros((2, 3)), np.zeros((3, 2)), axes=(5, 0))


class TestSvdTruncated:
    def test_diagonal_truncation(self):
        m = np.diag([1.0, 0.1]).astype(complex)
        res = svd_truncated(m, max_rank=1)
        assert np.allclose(res.singular_values, [1.0])
        assert res.discarded_weight == pytest.approx(0.01)

    def test_unitary_has_unit_singular_values(self, rng):
        q, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
        res = svd_truncated(q)
        assert np.allclose(res.singular_values, np.ones(6), atol=1e-12)

    def test_full_rank_reconstruction(self, rng):
        m = rng.normal(size=(8, 6)) + 1j * rng.normal(size=(8, 6))
        res = svd_truncated(m, cutoff=0.0)
        err = np.linalg.norm(res.reconstruct() - m)
        assert err < 1e-12

    def test_reconstruction_error_equals_sqrt_discarded(self, rng):
        m = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
        res = svd_truncated(m, max_rank=3)
        err = np.linalg.norm(res.reconstruct() - m)
        assert err == pytest.approx(np.sqrt(res.discarded_weight), rel=1e-10)

    def test_isometry_condition(self, rng):
        m = rng.normal(size=(9, 5)) + 1j * rng.normal(size=(9, 5))
        res = svd_truncated(m, max_rank=3)
        assert np.allclose(res.left.conj().T @ res.left, np.eye(3), atol=1e-12)
        assert np.allclose(res.right @ res.right.conj().T, np.eye(3), atol=1e-12)

    def test_keeps_at_least_one(self):
        res = svd_truncated(np.zeros((3, 3), dtype=complex), cutoff=0.5)
        assert res.rank == 1

    def test_singular_values_descending(self, rng):
        m = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
        res = svd_truncated(m)
        assert np.all(np.diff(res.singular_values) <= 1e-14)

    def test_rank1_input_validation(self):
        with pytest.raises(ShapeError):
            svd_truncated(np.zeros(4))
        with pytest.raises(ShapeError):
            svd_truncated(np.zeros((2, 2)), max_rank=0)
        with pytest.raises(ShapeError):
            svd_truncated(np.zeros((2, 2)), cutoff=-1e-3)


class TestHermitianExponential:
    def test_pauli_x_closed_form(self):
        out = hermitian_exponential(PAULI_X, -np.pi / 2)
        assert np.allclose(out, -1j * PAULI_X, atol=1e-12)

    def test_zero_scale_is_identity(self, rng):
        h = rng.normal(size=(5, 5))
        h = (h + h.T).astype(complex)
        assert np.allclose(hermitian_exponential(h, 0.0), np.eye(5), atol=1e-14)

    def test_matches_scaling_and_squaring(self, rng):
        h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = h + h.conj().T
        out = hermitian_exponential(h, -0.3)
        ref = scipy.linalg.expm(-0.3j * h)
        assert np.max(np.abs(out - ref)) < 1e-10

    def test_output_unitary(self, rng):
        h = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        h = h + h.conj().T
        out = hermitian_exponential(h, 1.7)
        assert is_unitary(out, tol=1e-10)

    def test_non_hermitian_rejected(self, rng):
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        with pytest.raises(NonHermitianError):
            hermitian_exponential(m, 1.0)


def test_generator_basis():
    gens = two_qubit_generators()
    assert gens.shape == (15, 4, 4)
    assert len(TWO_QUBIT_GENERATOR_LABELS) == 15
    assert "II" not in TWO_QUBIT_GENERATOR_LABELS
    # orthogonality: Tr(G_a G_b) = 4 delta_ab
    for a in range(15):
        for b in range(15):
            tr = np.trace(gens[a] @ gens[b])
            assert tr == pytest.approx(4.0 if a == b else 0.0, abs=1e-12)
