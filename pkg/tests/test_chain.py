import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cornerrank.chain import (
    build_chain,
    chain_from_projection,
    distinct_eigenvalue_check,
    extract_cyclic_vector,
    krylov_report,
    shift_to_invertible,
    subspace_intersection,
    subspace_sum,
    verify_shifts_forward,
)
from cornerrank.construct import GammaSpec, build_unequal_corners
from cornerrank.corners import decompose
from cornerrank.errors import InvalidInput, NotCyclicWitness
from cornerrank.linalg import haar_unitary


@pytest.fixture(scope="module", params=[3, 4, 6])
def cert(request):
    return build_unequal_corners(GammaSpec(request.param))


def test_shift_of_zero():
    D, lam = shift_to_invertible(np.zeros((3, 3)))
    assert lam == 1
    np.testing.assert_array_equal(D, np.eye(3))


def test_sum_and_intersection_of_coordinate_planes():
    e = np.eye(4)
    V, W = e[:, [0, 1]], e[:, [1, 2]]
    S, rr = subspace_sum(V, W)
    assert S.shape[1] == 3 and rr.certified
    X, rr = subspace_intersection(V, W)
    assert X.shape[1] == 1 and rr.certified
    assert abs(abs(X[1, 0]) - 1) < 1e-14


@given(st.integers(0, 2**32 - 1), st.integers(2, 7), st.data())
def test_intersection_dimension_formula(seed, n, data):
    a = data.draw(st.integers(1, n))
    b = data.draw(st.integers(1, n))
    U = haar_unitary(n, seed)
    V, W = U[:, :a], U[:, n - b:]
    X, _ = subspace_intersection(V, W)
    assert X.shape[1] == max(0, a + b - n)
    S, _ = subspace_sum(V, W)
    assert S.shape[1] == min(n, a + b)


def test_chain_dims_and_forward_shift(cert):
    m = cert.target.k
    chain, lam = chain_from_projection(cert.D, cert.P)
    assert lam == 0
    assert chain.dims == list(range(2 * m + 1))
    assert chain.strictly_increasing
    assert max(chain.nesting_residuals()) <= 1e-10
    res, holds = verify_shifts_forward(cert.D, chain)
    assert holds, res


def test_chain_invariant_under_shift(cert):
    dec = decompose(cert.D, cert.P)
    m = cert.target.k
    plain = build_chain(cert.D, dec.ranP_basis, m, m)
    shifted = build_chain(shift_to_invertible(cert.D)[0], dec.ranP_basis, m, m)
    assert plain.dims == shifted.dims


def test_cyclic_vector(cert):
    m = cert.target.k
    chain, _ = chain_from_projection(cert.D, cert.P)
    rep = extract_cyclic_vector(cert.D, chain)
    assert rep.krylov_rank.rank == 2 * m and rep.krylov_rank.certified
    assert rep.distinct and rep.eig_min_gap >= 2 - 1e-9
    assert max(rep.span_residuals) <= 1e-8


def test_build_chain_needs_invertible():
    with pytest.raises(InvalidInput):
        build_chain(np.zeros((2, 2)), np.eye(2)[:, :1], 1, 1)


def test_identity_is_not_cyclic():
    chain = build_chain(np.eye(3), np.eye(3)[:, :1], 1, 0)
    with pytest.raises(NotCyclicWitness) as info:
        extract_cyclic_vector(np.eye(3), chain)
    assert info.value.report.krylov_rank.rank == 1


def test_krylov_on_diagonal():
    D = np.diag([1.0, 2.0, 3.0, 4.0])
    Q, rr = krylov_report(D, np.ones(4))
    assert rr.rank == 4 and math.isinf(rr.gap_ratio)
    np.testing.assert_allclose(Q.conj().T @ Q, np.eye(4), atol=1e-12)
    _, rr = krylov_report(D, np.array([1.0, 1.0, 0.0, 0.0]))
    assert rr.rank == 2 and rr.certified


def test_distinct_eigenvalue_check():
    gap, distinct = distinct_eigenvalue_check(np.diag([1.0, 1.0, 2.0]))
    assert gap == 0 and not distinct
    gap, distinct = distinct_eigenvalue_check(np.diag([1.0, 2.0, 4.0]))
    assert gap == pytest.approx(1.0) and distinct


def test_pairwise_gap_matches_brute_force():
    rng = np.random.default_rng(4)
    z = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    brute = min(abs(a - b) for i, a in enumerate(z) for b in z[i + 1:])
    gap, _ = distinct_eigenvalue_check(np.diag(z))
    assert gap == pytest.approx(brute, rel=1e-12)


@pytest.mark.parametrize("m", range(1, 13))
def test_built_eigenvalues_distinct(m):
    _, distinct = distinct_eigenvalue_check(build_unequal_corners(GammaSpec(m)).D)
    assert distinct
