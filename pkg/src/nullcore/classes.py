"""Similarity classes of M_n(GF(q)).

Classes are labelled by the invariant-factor chain of xI - A, computed with a
Smith normal form over GF(q)[x].  Representatives are direct sums of companion
matrices.  For exhaustive work a whole ring is classified once and cached as
a :class:`RingCatalog`.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .field import (
    GF,
    ExtensionField,
    Field,
    Poly,
    PrimeField,
    build_extension,
    factorize,
    monic_divisors,
    monic_polys,
)
from .linalg import (
    Subspace,
    column_space,
    complement_basis,
    det_batch,
    identity,
    inverse,
    matmul,
    nullspace,
    poly_at_matrix,
    rank,
)
from .matpoly import minimal_polynomial

DEFAULT_BUDGET = 1 << 22


class BudgetExceeded(RuntimeError):
    """An exhaustive scan would exceed the allowed budget; sample instead."""


class InvariantViolation(AssertionError):
    """A structural property that must hold was observed to fail."""


@dataclass(frozen=True)
class ClassDescriptor:
    """A similarity class, given by its invariant factors d_1 | d_2 | ... | d_k."""

    n: int
    q: int
    invariant_factors: tuple[Poly, ...]

    def __post_init__(self):
        fs = self.invariant_factors
        if sum(f.degree for f in fs) != self.n:
            raise ValueError("invariant factor degrees must sum to n")
        for f in fs:
            if f.field != GF(self.q) or not f.is_monic() or f.degree < 1:
                raise ValueError(f"bad invariant factor {f}")
        for a, b in zip(fs, fs[1:]):
            if not a.divides(b):
                raise ValueError(f"{a} does not divide {b}")

    @property
    def field(self) -> PrimeField:
        return GF(self.q)

    @property
    def mu(self) -> Poly:
        return self.invariant_factors[-1]

    @property
    def t(self) -> int:
        return self.mu.degree

    @property
    def factors(self) -> list[tuple[Poly, int]]:
        """Irreducible factors of mu with multiplicities."""
        return factorize(self.mu)

    @property
    def elementary_divisors(self) -> list[tuple[Poly, int]]:
        out = []
        for d in self.invariant_factors:
            out.extend(factorize(d))
        return sorted(out, key=lambda pc: (pc[0].sort_key(), pc[1]))

    def is_scalar(self) -> bool:
        return self.t == 1

    def sort_key(self):
        return tuple(f.sort_key() for f in self.invariant_factors)

    def to_list(self) -> list[list[int]]:
        return [f.to_list() for f in self.invariant_factors]

    @classmethod
    def from_list(cls, n: int, q: int, data) -> "ClassDescriptor":
        return cls(n, q, tuple(Poly(GF(q), c) for c in data))

    def __str__(self):
        return "(" + ", ".join(str(f) for f in self.invariant_factors) + ")"


def _smith_diagonal(F: Field, M: list[list[Poly]]) -> list[Poly]:
    n = len(M)
    for k in range(n):
        while True:
            best = None
            for i in range(k, n):
                for j in range(k, n):
                    e = M[i][j]
                    if not e.is_zero() and (best is None or e.degree < best[0]):
                        best = (e.degree, i, j)
            if best is None:
                return [M[i][i] for i in range(n)]
            _, bi, bj = best
            M[k], M[bi] = M[bi], M[k]
            for row in M:
                row[k], row[bj] = row[bj], row[k]
            piv = M[k][k]
            clean = True
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    quo, rem = divmod(M[i][k], piv)
                    M[i] = [a - quo * b for a, b in zip(M[i], M[k])]
                    clean = clean and rem.is_zero()
            for j in range(k + 1, n):
                if not M[k][j].is_zero():
                    quo, rem = divmod(M[k][j], piv)
                    for row in M:
                        row[j] = row[j] - row[k] * quo
                    clean = clean and rem.is_zero()
            if not clean:
                continue
            bad = next(
                (i for i in range(k + 1, n) for j in range(k + 1, n) if not piv.divides(M[i][j])),
                None,
            )
            if bad is None:
                break
            M[k] = [a + b for a, b in zip(M[k], M[bad])]
    return [M[i][i] for i in range(n)]


def invariant_factors(F: Field, A: np.ndarray) -> tuple[Poly, ...]:
    """Invariant factors of xI - A (nonunit diagonal of its Smith form), ascending."""
    A = np.ascontiguousarray(A, dtype=np.int64)
    return _invariant_factors_cached(F, A.shape, A.tobytes())


@functools.lru_cache(maxsize=1 << 17)
def _invariant_factors_cached(F, shape, data):
    A = np.frombuffer(data, dtype=np.int64).reshape(shape)
    n = shape[0]
    x = Poly.x(F)
    M = [
        [(x if i == j else Poly(F)) - Poly.const(F, int(A[i, j])) for j in range(n)]
        for i in range(n)
    ]
    diag = [d.monic() for d in _smith_diagonal(F, M)]
    return tuple(sorted((d for d in diag if d.degree >= 1), key=Poly.sort_key))


def describe(F: PrimeField, A: np.ndarray) -> ClassDescriptor:
    return ClassDescriptor(A.shape[0], F.q, invariant_factors(F, A))


def enumerate_classes(n: int, q: int) -> list[ClassDescriptor]:
    """Every invariant-factor chain of total degree n, sorted by coefficient tuples."""
    GF(q)
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []

    def extend(rest: int, top: Poly, tail: tuple[Poly, ...]):
        if rest == 0:
            out.append(ClassDescriptor(n, q, tuple(reversed(tail))))
            return
        for d in monic_divisors(top):
            if 1 <= d.degree <= rest:
                extend(rest - d.degree, d, tail + (d,))

    for deg in range(1, n + 1):
        for mu in monic_polys(q, deg):
            extend(n - deg, mu, (mu,))
    return sorted(out, key=ClassDescriptor.sort_key)


def companion(p: Poly) -> np.ndarray:
    """Companion matrix with ones on the superdiagonal and -coefficients on the last row."""
    F = p.field
    s = p.degree
    C = np.zeros((s, s), dtype=np.int64)
    for i in range(s - 1):
        C[i, i + 1] = 1
    for j in range(s):
        C[s - 1, j] = F.neg(p.coeffs[j])
    return C


def class_representative(desc: ClassDescriptor) -> np.ndarray:
    n = desc.n
    R = np.zeros((n, n), dtype=np.int64)
    k = 0
    for f in desc.invariant_factors:
        s = f.degree
        R[k:k + s, k:k + s] = companion(f)
        k += s
    return R


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


def all_matrices(n: int, q: int) -> np.ndarray:
    N = q ** (n * n)
    codes = np.arange(N, dtype=np.int64)
    digits = np.empty((N, n * n), dtype=np.int64)
    for k in range(n * n):
        digits[:, k] = codes % q
        codes //= q
    return digits.reshape(N, n, n)


@dataclass
class RingCatalog:
    """Every matrix of M_n(GF(q)) with its similarity class."""

    n: int
    q: int
    matrices: np.ndarray
    classes: list[ClassDescriptor]
    members: list[np.ndarray]
    class_index: dict[ClassDescriptor, int] = dc_field(repr=False)

    def members_of(self, desc: ClassDescriptor) -> np.ndarray:
        return self.matrices[self.members[self.class_index[desc]]]


def _check_budget(n: int, q: int, budget: int):
    if q ** (n * n) > budget:
        raise BudgetExceeded(f"M_{n}(F_{q}) has {q ** (n * n)} matrices, budget is {budget}")


@functools.lru_cache(maxsize=8)
def _catalog(n: int, q: int) -> RingCatalog:
    F = GF(q)
    mats = all_matrices(n, q)
    labels: dict[tuple[Poly, ...], list[int]] = {}
    for idx, A in enumerate(mats):
        labels.setdefault(invariant_factors(F, A), []).append(idx)
    classes = sorted((ClassDescriptor(n, q, k) for k in labels), key=ClassDescriptor.sort_key)
    members = [np.array(labels[c.invariant_factors], dtype=np.int64) for c in classes]
    return RingCatalog(n, q, mats, classes, members, {c: i for i, c in enumerate(classes)})


def ring_catalog(n: int, q: int, budget: int = DEFAULT_BUDGET) -> RingCatalog:
    GF(q)
    _check_budget(n, q, budget)
    return _catalog(n, q)


def class_members(desc: ClassDescriptor, budget: int = DEFAULT_BUDGET) -> Iterator[np.ndarray]:
    cat = ring_catalog(desc.n, desc.q, budget)
    yield from cat.members_of(desc)


def commutant_basis(F: Field, A: np.ndarray) -> Subspace:
    """Row-major vec(X) for X with AX = XA."""
    n = A.shape[0]
    I = identity(n)
    left = np.kron(A, I) % F.char
    right = np.kron(I, A.T) % F.char
    return nullspace(F, F.vsub(left, right))


def class_size(desc: ClassDescriptor, budget: int = DEFAULT_BUDGET) -> int:
    """|GL_n(q)| / |centralizer|, counting units of the commutant when that fits the budget."""
    F = desc.field
    n, q = desc.n, desc.q
    rep = class_representative(desc)
    comm = commutant_basis(F, rep)
    e = comm.dim
    if q**e <= budget:
        basis = comm.matrix()
        codes = np.arange(q**e, dtype=np.int64)
        coef = np.empty((q**e, e), dtype=np.int64)
        for k in range(e):
            coef[:, k] = codes % q
            codes //= q
        elems = (coef @ basis % q).reshape(-1, n, n)
        units = int(np.count_nonzero(det_batch(F, elems)))
        return gl_order(n, q) // units
    if q ** (n * n) <= budget:
        return len(ring_catalog(n, q, budget).members_of(desc))
    raise BudgetExceeded(f"commutant has {q}^{e} elements and M_{n} has {q}^{n * n}; budget {budget}")


def random_invertible(F: PrimeField, n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        Q = rng.integers(0, F.q, size=(n, n), dtype=np.int64)
        if rank(F, Q) == n:
            return Q


def sample_class(desc: ClassDescriptor, rng: np.random.Generator) -> np.ndarray:
    """Q rep Q^-1 for Q uniform in GL_n(q): uniform on the class."""
    F = desc.field
    rep = class_representative(desc)
    Q = random_invertible(F, desc.n, rng)
    return matmul(F, matmul(F, Q, rep), inverse(F, Q))


# --- images of f_alpha -----------------------------------------------------


def cofactor(mu: Poly, K: Field, root: int) -> Poly:
    """f_alpha = mu / (x - alpha) over K."""
    return mu.embed(K).exact_div(Poly.linear(K, root))


def factor_field(q: int, p: Poly) -> Field:
    """The field holding the roots of p: GF(q) itself for linear p."""
    if p.degree == 1:
        return GF(q)
    return build_extension(q, p)


def factor_root(K: Field, p: Poly, index: int = 0) -> int:
    if isinstance(K, ExtensionField):
        return K.root(index)
    if index != 0:
        raise IndexError("a linear factor has a single root")
    return K.neg(p.coeffs[0])


def f_alpha_matrix(q: int, A: np.ndarray, mu: Poly, p: Poly, root_index: int = 0) -> tuple[Field, np.ndarray]:
    """(K, f_alpha(A)) with alpha the chosen root of p."""
    A = np.ascontiguousarray(A, dtype=np.int64)
    return _f_alpha_cached(q, A.shape, A.tobytes(), mu, p, root_index)


@functools.lru_cache(maxsize=1 << 17)
def _f_alpha_cached(q, shape, data, mu, p, root_index):
    A = np.frombuffer(data, dtype=np.int64).reshape(shape)
    if not p.divides(mu):
        raise ValueError(f"{p} does not divide {mu}")
    K = factor_field(q, p)
    alpha = factor_root(K, p, root_index)
    return K, poly_at_matrix(cofactor(mu, K, alpha), A)


def f_alpha_image(q: int, A: np.ndarray, mu: Poly, p: Poly, root_index: int = 0) -> Subspace:
    K, M = f_alpha_matrix(q, A, mu, p, root_index)
    return column_space(K, M)


@dataclass
class EquivClassStats:
    """Members of a class bucketed by Im f_alpha(A)."""

    factor: Poly
    s: int
    r: int
    class_count: int
    each_size: int
    buckets: dict[tuple, int]

    @property
    def class_size(self) -> int:
        return self.class_count * self.each_size


def image_equivalence_partition(
    desc: ClassDescriptor, p: Poly, budget: int = DEFAULT_BUDGET, root_index: int = 0
) -> EquivClassStats:
    if not p.divides(desc.mu):
        raise ValueError(f"{p} does not divide {desc.mu}")
    buckets: dict[tuple, int] = {}
    dims = set()
    for A in class_members(desc, budget):
        V = f_alpha_image(desc.q, A, desc.mu, p, root_index)
        dims.add(V.dim)
        buckets[V.basis] = buckets.get(V.basis, 0) + 1
    if len(dims) != 1:
        raise InvariantViolation(f"dim Im f_alpha varies across {desc}: {sorted(dims)}")
    sizes = set(buckets.values())
    if len(sizes) != 1:
        raise InvariantViolation(f"unequal bucket sizes in {desc}: {sorted(sizes)}")
    return EquivClassStats(p, p.degree, dims.pop(), len(buckets), sizes.pop(), buckets)


def count_formula(n: int, q: int, r: int, s: int) -> tuple[int, Fraction]:
    """Number of image-equivalence classes and the fraction of the class in each.

    Count = prod_{i=1}^{rs} (q^n - q^(i-1)) / prod_{i=1}^{r} (q^(rs) - q^((i-1)s)).
    """
    if r < 1 or s < 1:
        raise ValueError("r and s must be positive")
    if r * s > n:
        raise ValueError(f"rs = {r * s} exceeds n = {n}")
    num = 1
    for i in range(1, r * s + 1):
        num *= q**n - q ** (i - 1)
    den = 1
    for i in range(1, r + 1):
        den *= q ** (r * s) - q ** ((i - 1) * s)
    count, rem = divmod(num, den)
    if rem:
        raise InvariantViolation(f"count formula is not an integer for n={n} q={q} r={r} s={s}")
    return count, Fraction(den, num)


def realize_image(desc: ClassDescriptor, a: int, V: Subspace) -> np.ndarray:
    """A member B of the class with Im f_a(B) = V, for a linear factor x - a of mu."""
    F = desc.field
    lin = Poly.linear(F, a)
    if not lin.divides(desc.mu):
        raise ValueError(f"x - {a} does not divide {desc.mu}")
    rep = class_representative(desc)
    fa = desc.mu.exact_div(lin)
    W = column_space(F, poly_at_matrix(fa, rep))
    if V.field != F or V.n != desc.n:
        raise ValueError("V must be a subspace of F^n")
    if V.dim != W.dim:
        raise ValueError(f"dim V = {V.dim} but the class has r = {W.dim}")
    PW = np.vstack([W.matrix(), complement_basis(F, W)]).T
    PV = np.vstack([V.matrix(), complement_basis(F, V)]).T
    Q = matmul(F, PV, inverse(F, PW))
    B = matmul(F, matmul(F, Q, rep), inverse(F, Q))
    if column_space(F, poly_at_matrix(fa, B)) != V:
        raise InvariantViolation("conjugated representative does not realise V")
    return B


@dataclass
class RsReport:
    r: int
    s: int
    coordinates: np.ndarray
    rank: int


def verify_rs_independence(F: PrimeField, A: np.ndarray, p: Poly) -> RsReport:
    """Split a K-basis of Im f_alpha(A) into base-field coordinates and check they are independent."""
    if p.degree < 2:
        raise ValueError("needs an irreducible factor of degree >= 2")
    mu = minimal_polynomial(F, A)
    if not p.divides(mu):
        raise ValueError(f"{p} does not divide {mu}")
    V = f_alpha_image(F.q, A, mu, p)
    K = build_extension(F.q, p)
    s = p.degree
    rows = []
    for v in V.basis:
        digits = [K.coords(c) for c in v]
        for j in range(s):
            rows.append([d[j] for d in digits])
    coords = np.array(rows, dtype=np.int64).reshape(-1, A.shape[0])
    rk = rank(F, coords)
    if rk < V.dim * s:
        raise InvariantViolation(f"rank {rk} < rs = {V.dim * s} for A = {A.tolist()}")
    return RsReport(V.dim, s, coords, rk)


__all__ = [
    "BudgetExceeded",
    "ClassDescriptor",
    "EquivClassStats",
    "InvariantViolation",
    "RingCatalog",
    "RsReport",
    "class_members",
    "class_representative",
    "class_size",
    "companion",
    "count_formula",
    "describe",
    "enumerate_classes",
    "f_alpha_image",
    "f_alpha_matrix",
    "image_equivalence_partition",
    "invariant_factors",
    "realize_image",
    "ring_catalog",
    "sample_class",
    "verify_rs_independence",
]
