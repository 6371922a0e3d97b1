import itertools

import pytest
from hypothesis import given, strategies as st

from nullcore.field import (
    GF,
    ExtScalar,
    FieldMismatchError,
    Poly,
    build_extension,
    embed,
    enumerate_irreducibles,
    expand,
    factorize,
    is_irreducible,
    is_prime,
    monic_divisors,
    monic_polys,
    poly_gcd,
    poly_lcm,
)

PRIMES = [2, 3, 5, 7]


def test_is_prime():
    assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_gf_rejects_composite():
    with pytest.raises(ValueError):
        GF(4)


@pytest.mark.parametrize("q", PRIMES)
def test_prime_field_inverse_table(q):
    F = GF(q)
    for a in range(1, q):
        assert F.mul(a, F.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


# (q, modulus) pairs small enough to check the axioms over all triples
EXTENSIONS = [(2, [1, 1, 1]), (2, [1, 1, 0, 1]), (3, [1, 0, 1]), (3, [2, 1, 1])]


@pytest.mark.parametrize("q,mod", EXTENSIONS)
def test_extension_axioms_exhaustive(q, mod):
    K = build_extension(q, mod)
    els = list(K.elements())
    assert len(els) == q ** (len(mod) - 1)
    for a, b in itertools.product(els, repeat=2):
        assert K.add(a, b) == K.add(b, a)
        assert K.mul(a, b) == K.mul(b, a)
        assert K.sub(K.add(a, b), b) == a
        if b:
            assert K.mul(K.div(a, b), b) == a
    for a, b, c in itertools.product(els, repeat=3):
        assert K.mul(a, K.add(b, c)) == K.add(K.mul(a, b), K.mul(a, c))
        assert K.mul(K.mul(a, b), c) == K.mul(a, K.mul(b, c))


@pytest.mark.parametrize("q,mod", EXTENSIONS)
def test_roots_form_frobenius_orbit(q, mod):
    K = build_extension(q, mod)
    p = Poly(GF(q), mod).embed(K)
    roots = [K.root(i) for i in range(K.degree)]
    assert len(set(roots)) == K.degree
    for i, r in enumerate(roots):
        assert p(r) == 0
        assert K.frobenius(r) == roots[(i + 1) % K.degree]


def test_f4_known_values():
    K = build_extension(2, [1, 1, 1])  # y^2 + y + 1
    a = K.alpha
    assert isinstance(a, ExtScalar)
    assert (a * a).value == K.add(a.value, 1)  # y^2 = y + 1
    assert (a**3).value == 1
    assert a.inverse() == a * a


def test_base_embedding_is_identity_on_codes():
    K = build_extension(3, [1, 0, 1])
    F = GF(3)
    for a, b in itertools.product(range(3), repeat=2):
        assert K.mul(a, b) == F.mul(a, b)
        assert K.add(a, b) == F.add(a, b)
    assert embed(F.element(2), K).value == 2


def test_scalar_field_mismatch():
    with pytest.raises(FieldMismatchError):
        GF(2).element(1) + GF(3).element(1)


def test_extension_rejects_reducible():
    with pytest.raises(ValueError):
        build_extension(2, [1, 0, 1])  # (y+1)^2


def poly_strategy(q, max_deg=6):
    return st.lists(st.integers(0, q - 1), max_size=max_deg + 1).map(lambda c: Poly(GF(q), c))


@given(st.sampled_from(PRIMES).flatmap(lambda q: st.tuples(poly_strategy(q), poly_strategy(q))))
def test_divmod_identity(pair):
    f, g = pair
    if g.is_zero():
        with pytest.raises(ZeroDivisionError):
            divmod(f, g)
        return
    quo, rem = divmod(f, g)
    assert quo * g + rem == f
    assert rem.degree < g.degree


@given(st.sampled_from(PRIMES).flatmap(lambda q: st.tuples(poly_strategy(q), poly_strategy(q))))
def test_gcd_lcm_product(pair):
    f, g = pair
    if f.is_zero() or g.is_zero():
        return
    assert poly_gcd(f, g) * poly_lcm(f, g) == (f * g).monic()
    assert f.divides(poly_lcm(f, g)) and g.divides(poly_lcm(f, g))


@given(st.sampled_from(PRIMES).flatmap(lambda q: poly_strategy(q, 8)))
def test_factorize_round_trip(f):
    if f.degree < 1:
        return
    f = f.monic()
    facs = factorize(f)
    assert expand(facs, f.field) == f
    for p, c in facs:
        assert c >= 1 and p.is_monic() and is_irreducible(p)


@pytest.mark.parametrize("q,d,count", [(2, 1, 2), (2, 2, 1), (2, 3, 2), (2, 4, 3), (3, 2, 3), (5, 2, 10)])
def test_irreducible_counts(q, d, count):
    # Gauss: (1/d) sum_{e|d} mobius(e) q^(d/e)
    assert len(enumerate_irreducibles(q, d)) == count


def test_factorize_rejects_bad_input():
    F = GF(3)
    with pytest.raises(ValueError):
        factorize(Poly(F, [1, 2]))  # 2x + 1 is not monic
    with pytest.raises(ValueError):
        factorize(Poly.const(F, 1))


def test_monic_divisors():
    F = GF(2)
    f = Poly(F, [0, 1, 1])  # x^2 + x
    assert monic_divisors(f) == [Poly(F, [1]), Poly(F, [0, 1]), Poly(F, [1, 1]), f]


def test_monic_polys_order():
    assert [p.to_list() for p in monic_polys(2, 1)] == [[0, 1], [1, 1]]


def test_zero_poly_degree():
    assert Poly(GF(5), [0, 0]).degree == -1
