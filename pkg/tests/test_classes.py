import collections

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nullcore.classes import (
    ClassDescriptor,
    class_representative,
    class_size,
    companion,
    count_formula,
    describe,
    enumerate_classes,
    gl_order,
    image_equivalence_partition,
    invariant_factors,
    realize_image,
    ring_catalog,
    sample_class,
    verify_rs_independence,
    BudgetExceeded,
)
from nullcore.field import GF, Poly
from nullcore.linalg import Subspace, column_space, hyperplane_normals, inverse, is_invertible, matmul, poly_at_matrix
from nullcore.matpoly import minimal_polynomial

from conftest import brute_force_classes

RINGS = [(2, 2), (2, 3), (3, 2)]


def test_companion_layout():
    F = GF(2)
    assert companion(Poly(F, [1, 1, 1])).tolist() == [[0, 1], [1, 1]]


@pytest.mark.parametrize("n,q,expected", [(2, 2, 6), (2, 3, 12), (3, 2, 14)])
def test_class_counts(n, q, expected):
    assert len(enumerate_classes(n, q)) == expected


def test_catalog_matches_orbits(orbits_2_2):
    cat = ring_catalog(2, 2)
    ours = {frozenset(cat.matrices[i].tobytes() for i in idx) for idx in cat.members}
    assert ours == {frozenset(o) for o in orbits_2_2}


@pytest.mark.parametrize("n,q", RINGS)
def test_sizes_partition_ring(n, q):
    cat = ring_catalog(n, q)
    total = 0
    for desc, idx in zip(cat.classes, cat.members):
        assert class_size(desc) == len(idx)
        total += len(idx)
    assert total == q ** (n * n)
    assert cat.classes == enumerate_classes(n, q)


@pytest.mark.parametrize("n,q", RINGS)
def test_representatives_describe_their_class(n, q):
    F = GF(q)
    for desc in enumerate_classes(n, q):
        rep = class_representative(desc)
        assert describe(F, rep) == desc
        assert minimal_polynomial(F, rep) == desc.mu


@given(st.integers(0, 3**9 - 1), st.integers(0, 3**9 - 1))
def test_invariant_factors_conjugation(a, p):
    F = GF(3)
    A = np.array([(a // 3**k) % 3 for k in range(9)]).reshape(3, 3)
    P = np.array([(p // 3**k) % 3 for k in range(9)]).reshape(3, 3)
    if not is_invertible(F, P):
        return
    B = matmul(F, matmul(F, P, A), inverse(F, P))
    assert invariant_factors(F, A) == invariant_factors(F, B)
    assert invariant_factors(F, A)[-1] == minimal_polynomial(F, A)


def test_descriptor_validates_chain():
    F = GF(2)
    with pytest.raises(ValueError):
        ClassDescriptor(2, 2, (Poly(F, [0, 1]), Poly(F, [1, 1])))
    with pytest.raises(ValueError):
        ClassDescriptor(3, 2, (Poly(F, [0, 1]), Poly(F, [0, 1])))


def test_gl_order():
    assert gl_order(2, 2) == 6 and gl_order(2, 3) == 48 and gl_order(3, 2) == 168


def test_budget():
    with pytest.raises(BudgetExceeded):
        ring_catalog(3, 5, budget=1000)


def gaussian_binomial(n, r, q):
    num = den = 1
    for i in range(r):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


@pytest.mark.parametrize("n,q", [(2, 2), (3, 2), (3, 3), (4, 5)])
def test_count_formula_linear_is_gaussian_binomial(n, q):
    for r in range(1, n + 1):
        count, frac = count_formula(n, q, r, 1)
        assert count == gaussian_binomial(n, r, q)
        assert frac * count == 1


def test_count_formula_examples():
    assert count_formula(2, 2, 1, 2)[0] == 2
    assert count_formula(2, 3, 1, 2)[0] == 6
    with pytest.raises(ValueError):
        count_formula(2, 2, 2, 2)


@pytest.mark.parametrize("n,q", RINGS)
def test_partition_sizes_sum_to_class(n, q):
    cat = ring_catalog(n, q)
    for desc, idx in zip(cat.classes, cat.members):
        for p, _ in desc.factors:
            part = image_equivalence_partition(desc, p)
            assert part.class_size == len(idx)


def test_realize_image_hits_every_line():
    F = GF(3)
    desc = describe(F, np.array([[1, 0], [0, 2]]))  # mu = (x - 1)(x - 2)
    for a in (1, 2):
        fa = desc.mu.exact_div(Poly.linear(F, a))
        for w in hyperplane_normals(F, 2):
            V = Subspace.span(F, [w], 2)
            B = realize_image(desc, a, V)
            assert describe(F, B) == desc
            assert column_space(F, poly_at_matrix(fa, B)) == V


@pytest.mark.parametrize("n,q", RINGS)
def test_rs_independence(n, q):
    F = GF(q)
    cat = ring_catalog(n, q)
    for desc, idx in zip(cat.classes, cat.members):
        for p, _ in desc.factors:
            if p.degree < 2 or desc.n < p.degree:
                continue
            for A in cat.matrices[idx]:
                rep = verify_rs_independence(F, A, p)
                assert rep.rank == rep.r * rep.s


def test_sample_class_uniform():
    F = GF(2)
    desc = describe(F, np.array([[0, 1], [0, 1]]))
    members = {A.tobytes() for A in ring_catalog(2, 2).members_of(desc)}
    rng = np.random.default_rng(7)
    counts = collections.Counter(sample_class(desc, rng).tobytes() for _ in range(3000))
    assert set(counts) == members
    expected = 3000 / len(members)
    # chi-square, 5 degrees of freedom; 20.5 is the 0.999 quantile
    assert sum((c - expected) ** 2 / expected for c in counts.values()) < 20.5
