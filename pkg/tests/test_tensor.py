from itertools import permutations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wedgeprob.errors import ResourceGuardError, ValidationError
from wedgeprob.sampling import random_unitary
from wedgeprob.tensor import (
    antisym_basis,
    kron,
    numerical_rank,
    partial_trace,
    partial_transpose,
    permutations_with_sign,
    sym_basis,
)

from conftest import exact_rank, ginibre_matrix, random_density


def permutation_operator(d, perm):
    """U_pi on (C^d)^{(x) r}: moves tensor slot t to slot perm[t]."""
    r = len(perm)
    size = d**r
    out = np.zeros((size, size))
    for idx in np.ndindex(*(d,) * r):
        new = [0] * r
        for t, p in enumerate(perm):
            new[p] = idx[t]
        out[np.ravel_multi_index(tuple(new), (d,) * r), np.ravel_multi_index(idx, (d,) * r)] = 1
    return out


def perm_sign(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


class TestKron:
    def test_identity(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_diagonal(self):
        np.testing.assert_array_equal(kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))

    def test_index_convention_first_factor_slow(self, rng):
        a, b = ginibre_matrix(rng, 2, 3), ginibre_matrix(rng, 3, 2)
        k = kron(a, b)
        for i1, i2, j1, j2 in np.ndindex(2, 3, 3, 2):
            assert abs(k[i1 * 3 + i2, j1 * 2 + j2] - a[i1, j1] * b[i2, j2]) < 1e-15

    def test_mixed_product(self, rng):
        a, b, c, d = (ginibre_matrix(rng, 2, 2) for _ in range(4))
        np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)

    def test_associative(self, rng):
        a, b, c = (ginibre_matrix(rng, 2, 3) for _ in range(3))
        np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValidationError):
            kron(np.array([[np.nan]]), np.eye(1))


class TestPermutations:
    @pytest.mark.parametrize("r", range(1, 7))
    def test_heap_matches_itertools(self, r):
        perms, signs = permutations_with_sign(r)
        assert sorted(map(tuple, perms)) == sorted(permutations(range(r)))
        assert [perm_sign(p) for p in perms] == list(signs)

    def test_guard(self):
        with pytest.raises(ResourceGuardError):
            permutations_with_sign(9)


class TestBases:
    def test_sym_two_qubit_triplet(self):
        s = 1 / np.sqrt(2)
        expected = np.array([[1, 0, 0], [0, s, 0], [0, s, 0], [0, 0, 1]])
        np.testing.assert_allclose(sym_basis(2, 2), expected, atol=1e-15)

    @pytest.mark.parametrize("d", [1, 2, 5])
    def test_sym_r1_identity(self, d):
        np.testing.assert_array_equal(sym_basis(d, 1), np.eye(d))

    def test_antisym_empty_when_r_exceeds_d(self):
        assert antisym_basis(2, 3).shape == (8, 0)

    def test_antisym_singlet(self):
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(antisym_basis(2, 2), [[0], [s], [-s], [0]], atol=1e-15)

    @pytest.mark.parametrize("d,r", [(3, 3), (4, 2), (2, 4), (3, 2)])
    def test_orthonormal_and_widths(self, d, r):
        s, a = sym_basis(d, r), antisym_basis(d, r)
        assert s.shape[1] == comb(d + r - 1, r)
        assert a.shape[1] == comb(d, r)
        np.testing.assert_allclose(s.conj().T @ s, np.eye(s.shape[1]), atol=1e-12)
        np.testing.assert_allclose(a.conj().T @ a, np.eye(a.shape[1]), atol=1e-12)
        np.testing.assert_allclose(s.conj().T @ a, 0, atol=1e-12)

    def test_antisym_gram_4_2(self):
        a = antisym_basis(4, 2)
        np.testing.assert_allclose(a.conj().T @ a, np.eye(6), atol=1e-12)

    @pytest.mark.parametrize("d,r", [(2, 3), (3, 3), (4, 2)])
    def test_permutation_behaviour(self, d, r):
        s, a = sym_basis(d, r), antisym_basis(d, r)
        for perm in permutations(range(r)):
            u = permutation_operator(d, perm)
            np.testing.assert_allclose(u @ s, s, atol=1e-12)
            np.testing.assert_allclose(u @ a, perm_sign(perm) * a, atol=1e-12)

    def test_resource_guard(self):
        with pytest.raises(ResourceGuardError):
            sym_basis(30, 5)
        with pytest.raises(ResourceGuardError):
            antisym_basis(2, 9)


class TestNumericalRank:
    def test_drops_tiny_singular_value(self):
        rank, sv = numerical_rank(np.diag([1, 1e-14]), 1e-10)
        assert rank == 1
        assert sv[0] >= sv[1]

    @pytest.mark.parametrize("shape", [(3, 3), (0, 4), (4, 0)])
    def test_zero_matrix(self, shape):
        assert numerical_rank(np.zeros(shape), 0.3)[0] == 0

    def test_ginibre_full_rank_matches_exact_elimination(self):
        a = ginibre_matrix(np.random.default_rng(5), 5, 3)
        assert exact_rank(a) == 3
        assert numerical_rank(a, 1e-10)[0] == 3

    def test_exact_oracle_detects_deficiency(self):
        a = np.array([[1, 2], [2, 4], [1j, 2j]])
        assert exact_rank(a) == 1
        assert numerical_rank(a)[0] == 1

    def test_unitary_invariance(self, rng):
        x = ginibre_matrix(rng, 6, 2) @ ginibre_matrix(rng, 2, 5)
        u, w = random_unitary(6, rng), random_unitary(5, rng)
        assert numerical_rank(x)[0] == numerical_rank(u @ x @ w)[0] == 2

    def test_negative_tolerance_rejected(self):
        with pytest.raises(ValidationError):
            numerical_rank(np.eye(2), -1.0)


MAX_ENT = np.array([1, 0, 0, 1]) / np.sqrt(2)


class TestPartialTrace:
    def test_maximally_entangled(self):
        rho = np.outer(MAX_ENT, MAX_ENT.conj())
        # oracle: explicit sum over the traced index
        expected = np.zeros((2, 2), dtype=complex)
        for j, k, i in np.ndindex(2, 2, 2):
            expected[j, k] += rho[i * 2 + j, i * 2 + k]
        np.testing.assert_allclose(expected, np.eye(2) / 2)
        np.testing.assert_allclose(partial_trace(rho, 2, 2, "first"), np.eye(2) / 2, atol=1e-15)

    def test_product(self, rng):
        a, b = random_density(rng, 3), random_density(rng, 2)
        np.testing.assert_allclose(partial_trace(np.kron(a, b), 3, 2, "first"), np.trace(a) * b, atol=1e-12)
        np.testing.assert_allclose(partial_trace(np.kron(a, b), 3, 2, "second"), np.trace(b) * a, atol=1e-12)

    def test_trace_and_positivity(self, rng):
        for _ in range(20):
            rho = random_density(rng, 6)
            marg = partial_trace(rho, 2, 3, "first")
            assert abs(np.trace(marg) - 1) < 1e-12
            assert np.linalg.eigvalsh(marg).min() >= -1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            partial_trace(np.eye(5), 2, 2)


class TestPartialTranspose:
    def test_product(self, rng):
        a, b = ginibre_matrix(rng, 3, 3), ginibre_matrix(rng, 2, 2)
        np.testing.assert_allclose(partial_transpose(np.kron(a, b), 3, 2), np.kron(a, b.T), atol=1e-12)

    def test_index_formula(self, rng):
        m, n = 2, 3
        a = ginibre_matrix(rng, m * n, m * n)
        pt = partial_transpose(a, m, n)
        for i, j, k, l in np.ndindex(m, n, m, n):
            assert pt[i * n + j, k * n + l] == a[i * n + l, k * n + j]

    def test_maximally_entangled_spectrum(self):
        rho = np.outer(MAX_ENT, MAX_ENT)
        oracle = np.empty((4, 4))
        for i, j, k, l in np.ndindex(2, 2, 2, 2):
            oracle[i * 2 + j, k * 2 + l] = rho[i * 2 + l, k * 2 + j]
        np.testing.assert_allclose(np.linalg.eigvalsh(oracle), [-0.5, 0.5, 0.5, 0.5], atol=1e-15)
        np.testing.assert_allclose(np.linalg.eigvalsh(partial_transpose(rho, 2, 2)), [-0.5, 0.5, 0.5, 0.5], atol=1e-15)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_involution_and_trace(self, m, n, seed):
        a = ginibre_matrix(np.random.default_rng(seed), m * n, m * n)
        pt = partial_transpose(a, m, n)
        np.testing.assert_array_equal(partial_transpose(pt, m, n), a)
        assert abs(np.trace(pt) - np.trace(a)) < 1e-12
