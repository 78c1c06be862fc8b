import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cornerrank.errors import (
    InvalidInput,
    InvalidRank,
    NotHermitian,
    NotPositiveDefinite,
    ShapeError,
)
from cornerrank.linalg import (
    DEFAULT_TOL,
    ToleranceProfile,
    commuting_mn_factorization,
    direct_sum,
    frobenius_norm,
    haar_random_projection,
    haar_unitary,
    hadamard,
    hermitian_eig,
    hermitian_function,
    max_entry_norm,
    numerical_rank,
    operator_norm,
    orthonormal_basis,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_rank_of_clearly_separated_diagonal():
    rr = numerical_rank(np.diag([1.0, 1e-12]))
    assert rr.rank == 1
    assert rr.gap_ratio == pytest.approx(1e12)
    assert rr.certified


def test_rank_flags_values_near_threshold():
    rr = numerical_rank(np.diag([1.0, 1e-7, 5e-9]))
    assert rr.rank == 2
    assert rr.gap_ratio == pytest.approx(20.0)
    assert rr.ambiguous


def test_rank_of_zero_and_empty():
    assert numerical_rank(np.zeros((3, 3))).rank == 0
    empty = numerical_rank(np.zeros((0, 4)))
    assert empty.rank == 0 and math.isinf(empty.gap_ratio)


def test_external_scale_turns_roundoff_block_into_zero():
    block = np.full((2, 2), 1e-14)
    assert numerical_rank(block).rank == 1
    rr = numerical_rank(block, scale=1.0)
    assert rr.rank == 0 and rr.certified


def test_full_rank_has_infinite_gap():
    rr = numerical_rank(np.eye(4))
    assert rr.rank == 4 and math.isinf(rr.gap_ratio)


def test_rank_result_json_inf():
    assert numerical_rank(np.eye(2)).to_dict()["gap_ratio"] == "inf"


def test_as_matrix_rejects_nan_and_vectors():
    with pytest.raises(InvalidInput):
        numerical_rank(np.array([[np.nan]]))
    with pytest.raises(ShapeError):
        numerical_rank(np.ones(3))


@pytest.mark.parametrize("field", ["rank_rel_tol", "normality_rel_tol", "eig_distinct_rel_tol"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_tolerance_profile_validation(field, bad):
    with pytest.raises(InvalidInput):
        ToleranceProfile(**{field: bad})


def test_gap_factor_must_exceed_one():
    with pytest.raises(InvalidInput):
        ToleranceProfile(gap_factor=1.0)


@given(seeds, st.integers(1, 8), st.integers(1, 8), st.integers(0, 8))
def test_rank_of_random_product(seed, n, p, r):
    r = min(r, n, p)
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, r)) @ rng.standard_normal((r, p))
    rr = numerical_rank(A)
    assert rr.rank == r or rr.ambiguous


def test_norms_on_known_matrix():
    A = np.array([[3.0, 0.0], [4.0, 0.0]])
    assert frobenius_norm(A) == pytest.approx(5.0)
    assert operator_norm(A) == pytest.approx(5.0)
    assert max_entry_norm(A) == 4.0


def test_hadamard_and_shape_mismatch():
    X = np.array([[1, 2], [3, 4]])
    np.testing.assert_array_equal(hadamard(X, X), np.array([[1, 4], [9, 16]]))
    with pytest.raises(ShapeError):
        hadamard(np.ones((2, 2)), np.ones((2, 3)))


def test_hermitian_eig_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_function_sqrt():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    R = hermitian_function(A, np.sqrt)
    np.testing.assert_allclose(R @ R, A, atol=1e-14)


def test_mn_scalar_oracle():
    M, N = commuting_mn_factorization(np.array([[2.0]]))
    assert M[0, 0].real == pytest.approx(2 / math.sqrt(5), abs=1e-15)
    assert N[0, 0].real == pytest.approx(1 / math.sqrt(5), abs=1e-15)


def test_mn_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        commuting_mn_factorization(np.diag([1.0, -1.0]))


@given(seeds, st.integers(1, 7))
def test_mn_identities(seed, n):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    S = G @ G.conj().T + 0.1 * np.eye(n)
    M, N = commuting_mn_factorization(S)
    scale = 1 + operator_norm(S)
    np.testing.assert_allclose(M @ M + N @ N, np.eye(n), atol=1e-10)
    np.testing.assert_allclose(M @ N, N @ M, atol=1e-10)
    np.testing.assert_allclose(M, S @ N, atol=1e-10 * scale)
    assert np.linalg.eigvalsh(N).min() > 0


@given(seeds, st.integers(1, 10))
def test_haar_unitary_is_unitary(seed, n):
    U = haar_unitary(n, seed)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(n), atol=1e-12)


def test_haar_unitary_reproducible():
    np.testing.assert_array_equal(haar_unitary(5, 3), haar_unitary(5, 3))


@given(seeds, st.integers(1, 10), st.data())
def test_haar_projection_properties(seed, n, data):
    r = data.draw(st.integers(0, n))
    P = haar_random_projection(n, r, seed)
    np.testing.assert_allclose(P @ P, P, atol=1e-12)
    np.testing.assert_allclose(P, P.conj().T, atol=1e-15)
    assert np.trace(P).real == pytest.approx(r, abs=1e-12)


def test_haar_projection_rejects_bad_rank():
    with pytest.raises(InvalidRank):
        haar_random_projection(3, 4)
    with pytest.raises(InvalidRank):
        haar_random_projection(3, -1)


def test_orthonormal_basis_of_rank_two():
    A = np.array([[1, 1, 2], [0, 1, 1], [0, 0, 0]], dtype=float)
    Q, rr = orthonormal_basis(A)
    assert rr.rank == 2 and Q.shape == (3, 2)
    np.testing.assert_allclose(Q.conj().T @ Q, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(Q @ (Q.conj().T @ A), A, atol=1e-13)


def test_direct_sum_with_empty_block():
    D = direct_sum(np.zeros((0, 0)), np.array([[1]]), np.eye(2))
    np.testing.assert_array_equal(D, np.eye(3))
    assert DEFAULT_TOL.gap_factor == 1e3
