import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nullcore.field import GF, FieldMismatchError, build_extension
from nullcore.linalg import (
    Subspace,
    column_space,
    complement_basis,
    det_batch,
    extend_scalars,
    hyperplane_normals,
    inverse,
    matmul,
    nullspace,
    orthocomplement,
    rank,
    restrict_to_base,
    rref,
    subspace_intersection,
    subspace_sum,
)


def vectors(q, n, max_count=4):
    return st.lists(st.lists(st.integers(0, q - 1), min_size=n, max_size=n), max_size=max_count)


spaces = st.sampled_from([(2, 3), (3, 3), (5, 2), (2, 4)]).flatmap(
    lambda qn: st.tuples(st.just(qn), vectors(*qn), vectors(*qn))
)


def test_rref_known():
    F = GF(5)
    R, r, piv = rref(F, np.array([[2, 4, 1], [1, 2, 4]]))
    assert r == 2 and piv == [0, 2]
    assert R.tolist() == [[1, 2, 0], [0, 0, 1]]


@given(spaces)
def test_perp_involution(data):
    (q, n), a, _ = data
    V = Subspace.span(GF(q), a, n) if a else Subspace.zero(GF(q), n)
    W = orthocomplement(V)
    assert V.dim + W.dim == n
    assert orthocomplement(W) == V


@given(spaces)
def test_de_morgan(data):
    (q, n), a, b = data
    F = GF(q)
    V = Subspace.span(F, a, n) if a else Subspace.zero(F, n)
    W = Subspace.span(F, b, n) if b else Subspace.zero(F, n)
    both = subspace_intersection([V, W])
    assert orthocomplement(both) == subspace_sum([orthocomplement(V), orthocomplement(W)])
    assert both <= V and both <= W
    assert both.dim + subspace_sum([V, W]).dim == V.dim + W.dim


def test_intersection_brute_force():
    F = GF(2)
    V = Subspace.span(F, [[1, 1, 0], [0, 0, 1]], 3)
    W = Subspace.span(F, [[1, 0, 0], [0, 1, 1]], 3)
    pts = [v for v in itertools.product(range(2), repeat=3) if V.contains(v) and W.contains(v)]
    assert len(pts) == 2 ** subspace_intersection([V, W]).dim
    assert set(pts) == {(0, 0, 0), (1, 1, 1)}


def test_nullspace_property():
    F = GF(3)
    M = np.array([[1, 2, 0, 1], [0, 1, 1, 2]])
    N = nullspace(F, M)
    assert N.dim == 2
    for v in N.basis:
        assert not (M @ np.array(v) % 3).any()


def test_inverse_and_det():
    F = GF(7)
    A = np.array([[2, 3], [1, 4]])
    assert (matmul(F, A, inverse(F, A)) == np.eye(2, dtype=int)).all()
    assert det_batch(F, A[None])[0] == (2 * 4 - 3) % 7
    with pytest.raises(ZeroDivisionError):
        inverse(F, np.array([[1, 2], [2, 4]]))


def test_rank_over_extension():
    K = build_extension(2, [1, 1, 1])
    a = K.root(0)
    # [1, a; a, a^2] has rank 1
    M = np.array([[1, a], [a, K.mul(a, a)]])
    assert rank(K, M) == 1


def test_extend_then_restrict():
    F = GF(3)
    K = build_extension(3, [1, 0, 1])
    V = Subspace.span(F, [[1, 2, 0]], 3)
    VK = extend_scalars(V, K)
    assert VK.dim == 1 and restrict_to_base(VK) == V
    # the K-line through (1, i) meets F^2 only in 0
    i = K.root(0)
    L = Subspace.span(K, [[1, i]], 2)
    assert restrict_to_base(L).is_zero()


def test_mismatched_spaces_raise():
    with pytest.raises(ValueError):
        subspace_sum([Subspace.zero(GF(2), 2), Subspace.zero(GF(2), 3)])
    with pytest.raises(FieldMismatchError):
        subspace_sum([Subspace.zero(GF(2), 2), Subspace.zero(GF(3), 2)])


def test_complement_basis_completes():
    F = GF(5)
    V = Subspace.span(F, [[1, 2, 3]], 3)
    full = np.vstack([V.matrix(), complement_basis(F, V)])
    assert rank(F, full) == 3


@pytest.mark.parametrize("order,n", [(2, 2), (3, 3), (4, 2)])
def test_hyperplane_count(order, n):
    F = GF(order) if order != 4 else build_extension(2, [1, 1, 1])
    normals = list(hyperplane_normals(F, n))
    assert len(normals) == (order**n - 1) // (order - 1)
    assert len({column_space(F, np.array([v]).T) for v in normals}) == len(normals)
