import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ciext.errors import ZeroInverse
from ciext.linalg import PrimeField, inv, is_prime, kernel_basis, rank, rref, solve_in_span


def test_inverse_examples():
    assert inv(PrimeField(5)(2)) == 3
    assert inv(PrimeField(7)(1)) == 1
    with pytest.raises(ZeroInverse):
        inv(PrimeField(5)(0))
    with pytest.raises(ZeroInverse):
        PrimeField(5).inv(0)


def test_field_rejects_composite():
    with pytest.raises(ValueError):
        PrimeField(91)


def test_field_elements_reduced():
    F = PrimeField(101)
    a = F(-1)
    assert a.value == 100
    assert (a * a).value == 1
    assert (a / F(3) * 3).value == 100


@given(st.sampled_from([2, 3, 5, 101, 32003]), st.integers(1, 10**6))
def test_inverse_property(p, a):
    if a % p == 0:
        return
    assert a * PrimeField(p).inv(a) % p == 1


def test_rref_examples():
    R, piv, rk = rref([[2, 4], [1, 2]], 5)
    assert R.tolist() == [[1, 2], [0, 0]] and piv == [0] and rk == 1
    R, piv, rk = rref(np.eye(3, dtype=int), 7)
    assert (R == np.eye(3)).all() and rk == 3
    R, piv, rk = rref(np.zeros((2, 2), dtype=int), 7)
    assert not R.any() and rk == 0


def test_kernel_examples():
    K = kernel_basis(np.array([[2, 4], [1, 2]]), 5)
    assert K.shape == (2, 1)
    assert (np.array([[2, 4], [1, 2]]) @ K % 5 == 0).all()
    assert K[:, 0].tolist() == [3, 1]
    assert kernel_basis(np.array([[1, 2], [3, 4]]), 5).shape[1] == 0
    assert (kernel_basis(np.zeros((2, 3), dtype=int), 5) == np.eye(3)).all()


def _brute_rank(M, p):
    """Rank as log_p of the number of distinct row combinations."""
    M = np.asarray(M) % p
    rows = M.shape[0]
    span = {tuple((np.array(c) @ M) % p) for c in itertools.product(range(p), repeat=rows)}
    r = 0
    while p ** r < len(span):
        r += 1
    return r


matrices = st.integers(1, 3).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, 4), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_rank_matches_brute_force(M):
    assert rank(np.array(M), 5) == _brute_rank(M, 5)


@given(matrices)
def test_rref_invariants(M):
    M = np.array(M)
    R, piv, rk = rref(M, 5)
    assert rk == len(piv) == _brute_rank(M, 5)
    for r, c in enumerate(piv):
        assert R[r, c] == 1
        assert sum(R[:, c] != 0) == 1
    assert not R[rk:].any()
    K = kernel_basis(M, 5)
    assert K.shape[1] == M.shape[1] - rk
    assert (M @ K % 5 == 0).all()


@given(matrices, st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_solve_in_span(M, coeffs):
    B = np.array(M).T
    x = np.array(coeffs[: B.shape[1]])
    target = B @ x % 5
    sol = solve_in_span(B, target, 5)
    assert sol is not None
    assert ((B @ sol - target) % 5 == 0).all()


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
