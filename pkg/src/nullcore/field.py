"""Exact arithmetic in prime fields F_q and their extensions F_q[y]/(p(y)).

Field elements are encoded as plain ints so that numpy arrays of them can be
used for linear algebra.  In an extension of degree s the element
b_0 + b_1 y + ... + b_{s-1} y^{s-1} is encoded as sum(b_i * q**i).  With this
encoding a base-field element has the same code in every extension, so
embedding F_q -> K is the identity on codes.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class FieldMismatchError(ValueError):
    """Operands live in different fields."""


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


class PrimeField:
    """The field Z/qZ, q prime."""

    degree = 1

    def __init__(self, q: int):
        if not is_prime(q):
            raise ValueError(f"q={q} is not prime; only prime fields are supported")
        self.q = q
        self.char = q
        self.order = q
        self._inv = [0] + [pow(a, q - 2, q) for a in range(1, q)]

    def __eq__(self, other):
        return type(other) is PrimeField and other.q == self.q

    def __hash__(self):
        return hash(("F", self.q))

    def __repr__(self):
        return f"GF({self.q})"

    @property
    def base(self) -> "PrimeField":
        return self

    # scalar ops on codes
    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        return -a % self.q

    def mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("division by zero in " + repr(self))
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        return pow(a, e, self.q)

    # vectorised ops on integer arrays
    def vadd(self, a, b):
        return (a + b) % self.q

    def vsub(self, a, b):
        return (a - b) % self.q

    def vneg(self, a):
        return -a % self.q

    def vmul(self, a, b):
        return (a * b) % self.q

    def elements(self) -> range:
        return range(self.q)

    def coords(self, a: int) -> tuple[int, ...]:
        return (a % self.q,)

    def element(self, value: int) -> "Scalar":
        return Scalar(self, value % self.q)


@functools.lru_cache(maxsize=None)
def GF(q: int) -> PrimeField:
    return PrimeField(q)


class ExtensionField:
    """K = F_q[y]/(p(y)) for a monic irreducible p of degree s.

    Doubles as the extension descriptor: ``roots`` lists the Frobenius orbit
    (alpha, alpha^q, ..., alpha^(q^(s-1))) of the distinguished root alpha.
    For s = 1 alpha is the unique root of p in F_q rather than the class of y.
    """

    def __init__(self, q: int, modulus: "Poly"):
        self.base = GF(q)
        self.q = q
        self.char = q
        if modulus.field != self.base:
            raise FieldMismatchError("defining polynomial must have coefficients in GF(q)")
        if not modulus.is_monic() or modulus.degree < 1:
            raise ValueError("defining polynomial must be monic of degree >= 1")
        if not is_irreducible(modulus):
            raise ValueError(f"{modulus} is reducible over GF({q})")
        self.modulus = modulus
        self.degree = s = modulus.degree
        self.order = q**s
        self._build_tables()
        if s == 1:
            alpha = (-modulus.coeffs[0]) % q
        else:
            alpha = q  # class of y
        orbit = [alpha]
        for _ in range(s - 1):
            orbit.append(self.power(orbit[-1], q))
        self._root_codes = tuple(orbit)

    def _build_tables(self):
        q, s, N = self.q, self.degree, self.order
        digits = np.array([[(e // q**i) % q for i in range(s)] for e in range(N)], dtype=np.int64)
        weights = q ** np.arange(s, dtype=np.int64)
        # multiplication by y on coordinate vectors (companion of the modulus)
        Cy = np.zeros((s, s), dtype=np.int64)
        low = self.modulus.coeffs
        for i in range(s - 1):
            Cy[i + 1, i] = 1
        for i in range(s):
            Cy[i, s - 1] = (-low[i]) % q
        powers = [np.eye(s, dtype=np.int64)]
        for _ in range(s - 1):
            powers.append(Cy @ powers[-1] % q)
        mul = np.empty((N, N), dtype=np.int64)
        for a in range(N):
            Ma = sum(int(digits[a, i]) * powers[i] for i in range(s)) % q
            prod = (digits @ Ma.T) % q
            mul[a] = prod @ weights
        add = ((digits[:, None, :] + digits[None, :, :]) % q) @ weights
        neg = ((-digits) % q) @ weights
        inv = np.zeros(N, dtype=np.int64)
        inv[1:] = np.argmax(mul[1:] == 1, axis=1)
        self._digits = digits
        self._mul = mul
        self._add = add
        self._neg = neg
        self._inv = inv

    def __eq__(self, other):
        return type(other) is ExtensionField and other.q == self.q and other.modulus == self.modulus

    def __hash__(self):
        return hash(("K", self.q, self.modulus.coeffs))

    def __repr__(self):
        return f"GF({self.q})[y]/({self.modulus.to_str('y')})"

    @property
    def alpha(self) -> "ExtScalar":
        return ExtScalar(self, self._root_codes[0])

    @property
    def roots(self) -> tuple["ExtScalar", ...]:
        return tuple(ExtScalar(self, r) for r in self._root_codes)

    def root(self, i: int = 0) -> int:
        return self._root_codes[i]

    def add(self, a, b):
        return int(self._add[a, b])

    def sub(self, a, b):
        return int(self._add[a, self._neg[b]])

    def neg(self, a):
        return int(self._neg[a])

    def mul(self, a, b):
        return int(self._mul[a, b])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by zero in " + repr(self))
        return int(self._inv[a])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frobenius(self, a: int) -> int:
        return self.power(a, self.q)

    def vadd(self, a, b):
        return self._add[a, b]

    def vsub(self, a, b):
        return self._add[a, self._neg[b]]

    def vneg(self, a):
        return self._neg[a]

    def vmul(self, a, b):
        return self._mul[a, b]

    def elements(self) -> range:
        return range(self.order)

    def coords(self, a: int) -> tuple[int, ...]:
        return tuple(int(d) for d in self._digits[a])

    def from_coords(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates, got {len(coeffs)}")
        return sum((c % self.q) * self.q**i for i, c in enumerate(coeffs))

    def element(self, value) -> "ExtScalar":
        if isinstance(value, (list, tuple)):
            value = self.from_coords(value)
        return ExtScalar(self, value)


Field = PrimeField | ExtensionField


@dataclass(frozen=True)
class Scalar:
    """An element of a field, stored by its integer code."""

    field: Field
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.order:
            raise ValueError(f"code {self.value} out of range for {self.field!r}")

    def _check(self, other) -> int:
        if isinstance(other, int) and not isinstance(other, bool):
            return other % self.field.char
        if not isinstance(other, Scalar):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
        return other.value

    def _wrap(self, v: int):
        return type(self)(self.field, v)

    def __add__(self, other):
        return self._wrap(self.field.add(self.value, self._check(other)))

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.value, self._check(other)))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.value, self._check(other)))

    def __truediv__(self, other):
        return self._wrap(self.field.div(self.value, self._check(other)))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, e: int):
        if e < 0:
            return self._wrap(self.field.power(self.field.inv(self.value), -e))
        return self._wrap(self.field.power(self.value, e))

    def inverse(self):
        return self._wrap(self.field.inv(self.value))

    def __int__(self):
        return self.value

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.coords(self.value)

    def __repr__(self):
        if isinstance(self.field, PrimeField):
            return f"{self.value} (mod {self.field.q})"
        return f"{list(self.coeffs)} in {self.field!r}"


class ExtScalar(Scalar):
    """Element of an extension field; ``coeffs`` are coordinates in 1, y, ..., y^(s-1)."""


def field_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field!r} vs {b.field!r}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


class Poly:
    """Dense univariate polynomial, coefficients lowest degree first.

    The zero polynomial has no coefficients and degree -1.
    """

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: Field, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        if isinstance(field, PrimeField):
            cs = [c % field.q for c in cs]
        elif any(not 0 <= c < field.order for c in cs):
            raise ValueError(f"coefficient out of range for {field!r}")
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def x(cls, field: Field) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def const(cls, field: Field, c: int) -> "Poly":
        return cls(field, (c,))

    @classmethod
    def linear(cls, field: Field, root: int) -> "Poly":
        """x - root."""
        return cls(field, (field.neg(root), 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        c = self.field.inv(self.lc())
        return Poly(self.field, [self.field.mul(c, a) for a in self.coeffs])

    def _same(self, other: "Poly"):
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")

    def __eq__(self, other):
        return isinstance(other, Poly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.coeffs))
        return self._hash

    def __add__(self, other: "Poly") -> "Poly":
        self._same(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly(F, [F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)])

    def __neg__(self) -> "Poly":
        return Poly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._same(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(F)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
        return Poly(F, out)

    def scale(self, c: int) -> "Poly":
        return Poly(self.field, [self.field.mul(c, a) for a in self.coeffs])

    def __pow__(self, e: int) -> "Poly":
        result = Poly.const(self.field, 1)
        for _ in range(e):
            result = result * self
        return result

    def __divmod__(self, other: "Poly"):
        self._same(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        rem = list(self.coeffs)
        dg = other.degree
        inv_lc = F.inv(other.lc())
        quot = [0] * max(len(rem) - dg, 0)
        for k in range(len(rem) - 1, dg - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            c = F.mul(c, inv_lc)
            quot[k - dg] = c
            for j, bj in enumerate(other.coeffs):
                rem[k - dg + j] = F.sub(rem[k - dg + j], F.mul(c, bj))
        return Poly(F, quot), Poly(F, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other: "Poly") -> bool:
        return (other % self).is_zero()

    def exact_div(self, other: "Poly") -> "Poly":
        quot, rem = divmod(self, other)
        if not rem.is_zero():
            raise ValueError(f"{other} does not divide {self}")
        return quot

    def __call__(self, value: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, value), c)
        return acc

    def embed(self, K: Field) -> "Poly":
        if K.base != self.field.base or not isinstance(self.field, PrimeField):
            raise FieldMismatchError(f"cannot embed {self.field!r} into {K!r}")
        return Poly(K, self.coeffs)

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def sort_key(self):
        return (self.degree, self.coeffs)

    def to_str(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if isinstance(self.field, ExtensionField) and self.field.degree > 1:
                cs = "(" + ",".join(map(str, self.field.coords(c))) + ")"
            else:
                cs = str(c)
            mon = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if not mon:
                terms.append(cs)
            elif c == 1:
                terms.append(mon)
            else:
                terms.append(f"{cs}*{mon}")
        return " + ".join(terms)

    def __repr__(self):
        return f"Poly({self.to_str()})"

    def __str__(self):
        return self.to_str()


def poly_gcd(f: Poly, g: Poly) -> Poly:
    f._same(g)
    a, b = f, g
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_lcm(f: Poly, g: Poly) -> Poly:
    f._same(g)
    if f.is_zero() or g.is_zero():
        return Poly(f.field)
    return (f * g).exact_div(poly_gcd(f, g)).monic()


def poly_arith(f: Poly, g: Poly, op: str):
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "divmod":
        return divmod(f, g)
    if op == "gcd":
        return poly_gcd(f, g)
    if op == "lcm":
        return poly_lcm(f, g)
    raise ValueError(f"unknown operation {op!r}")


def monic_polys(q: int, d: int):
    """All monic polynomials of degree d over GF(q), lexicographic on coefficient tuples."""
    F = GF(q)
    for low in itertools.product(range(q), repeat=d):
        yield Poly(F, low + (1,))


@functools.lru_cache(maxsize=None)
def _irreducibles(q: int, d: int) -> tuple[Poly, ...]:
    if d < 1:
        raise ValueError("degree must be >= 1")
    if d == 1:
        return tuple(monic_polys(q, 1))
    smaller = [p for k in range(1, d // 2 + 1) for p in _irreducibles(q, k)]
    return tuple(f for f in monic_polys(q, d) if not any(p.divides(f) for p in smaller))


def enumerate_irreducibles(q: int, d: int) -> list[Poly]:
    GF(q)  # validates q
    return list(_irreducibles(q, d))


def _prime_field_poly(f: Poly):
    if not isinstance(f.field, PrimeField):
        raise FieldMismatchError("factorisation is only defined over GF(q)")


def factorize(f: Poly) -> list[tuple[Poly, int]]:
    """Factor a monic polynomial over GF(q) into (irreducible, multiplicity) pairs.

    Trial division against the irreducibles of degree <= deg f / 2; whatever
    survives is irreducible.  Factors come out sorted by (degree, coeffs).
    """
    _prime_field_poly(f)
    if f.degree < 1:
        raise ValueError("cannot factor a constant polynomial")
    if not f.is_monic():
        raise ValueError(f"{f} is not monic")
    q = f.field.q
    out: dict[Poly, int] = {}
    rest = f
    d = 1
    while 2 * d <= rest.degree:
        for p in _irreducibles(q, d):
            while True:
                quot, rem = divmod(rest, p)
                if not rem.is_zero():
                    break
                out[p] = out.get(p, 0) + 1
                rest = quot
        d += 1
    if rest.degree >= 1:
        out[rest] = out.get(rest, 0) + 1
    return sorted(out.items(), key=lambda pc: pc[0].sort_key())


def expand(factors: Iterable[tuple[Poly, int]], field: Field) -> Poly:
    result = Poly.const(field, 1)
    for p, c in factors:
        result = result * p**c
    return result


def is_irreducible(f: Poly) -> bool:
    _prime_field_poly(f)
    if f.degree < 1:
        return False
    fs = factorize(f.monic())
    return len(fs) == 1 and fs[0][1] == 1


def monic_divisors(f: Poly) -> list[Poly]:
    """Every monic divisor of f (including 1 and f.monic())."""
    facs = factorize(f.monic())
    F = f.field
    out = []
    for exps in itertools.product(*[range(c + 1) for _, c in facs]):
        out.append(expand([(p, e) for (p, _), e in zip(facs, exps)], F))
    return sorted(out, key=Poly.sort_key)


@functools.lru_cache(maxsize=None)
def _extension(q: int, coeffs: tuple[int, ...]) -> ExtensionField:
    return ExtensionField(q, Poly(GF(q), coeffs))


def build_extension(q: int, p) -> ExtensionField:
    """Extension descriptor for GF(q)[y]/(p); ``p`` is a Poly or ascending coefficient list."""
    if not isinstance(p, Poly):
        p = Poly(GF(q), p)
    if p.field != GF(q):
        raise FieldMismatchError("defining polynomial must be over GF(q)")
    return _extension(q, p.coeffs)


def embed(v, K: ExtensionField):
    """Embed a base-field scalar, matrix or polynomial into K (identity on codes)."""
    if isinstance(v, Poly):
        return v.embed(K)
    if isinstance(v, Scalar):
        if v.field != K.base:
            raise FieldMismatchError(f"cannot embed {v.field!r} into {K!r}")
        return ExtScalar(K, v.value)
    arr = np.asarray(v, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= K.q):
        raise ValueError("entries are not reduced base-field codes")
    return arr.copy()


def as_field(F) -> Field:
    if isinstance(F, (PrimeField, ExtensionField)):
        return F
    return GF(int(F))
