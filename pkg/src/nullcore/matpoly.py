"""Matrix-coefficient polynomials, minimal polynomials and annihilator spaces.

Polynomials in M_n(F)[x] are written with coefficients to the left of the
powers of x and evaluated by substituting on the right:
f(A) = sum_k B_k A^k.

Linear systems over unknown coefficient matrices stack the unknowns as the
entries of B_0 in row-major order, then B_1, and so on.  Every routine that
returns a space of matrix polynomials uses this order, so spaces computed by
different routines can be compared directly.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .field import Field, Poly, poly_lcm
from .linalg import (
    Subspace,
    column_space,
    identity,
    matmul,
    nullspace,
    orthocomplement,
    poly_at_matrix,
    row_space_of_set,
    rref,
    zeros,
)


class MatrixPoly:
    """Polynomial sum_k B_k x^k with n x n matrix coefficients."""

    __slots__ = ("field", "n", "coeffs")

    def __init__(self, field: Field, coeffs: Sequence[np.ndarray], n: int | None = None):
        cs = [np.array(c, dtype=np.int64) for c in coeffs]
        if n is None:
            if not cs:
                raise ValueError("dimension required for the zero polynomial")
            n = cs[0].shape[0]
        for c in cs:
            if c.shape != (n, n):
                raise ValueError(f"coefficient of shape {c.shape}, expected {(n, n)}")
        while cs and not cs[-1].any():
            cs.pop()
        self.field = field
        self.n = n
        self.coeffs = tuple(cs)

    @classmethod
    def from_scalar_poly(cls, g: Poly, n: int) -> "MatrixPoly":
        """g(x) * I."""
        return cls(g.field, [c * identity(n) for c in g.coeffs], n)

    @classmethod
    def from_vector(cls, F: Field, v, n: int, d: int) -> "MatrixPoly":
        """De-stack a coefficient vector of length n*n*d."""
        v = np.asarray(v, dtype=np.int64)
        if v.size != n * n * d:
            raise ValueError(f"vector of length {v.size}, expected {n * n * d}")
        return cls(F, [v[k * n * n:(k + 1) * n * n].reshape(n, n) for k in range(d)], n)

    def to_vector(self, d: int) -> np.ndarray:
        if self.degree >= d:
            raise ValueError(f"degree {self.degree} does not fit in {d} coefficients")
        out = np.zeros(self.n * self.n * d, dtype=np.int64)
        for k, c in enumerate(self.coeffs):
            out[k * self.n * self.n:(k + 1) * self.n * self.n] = c.reshape(-1)
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, MatrixPoly)
            and self.field == other.field
            and self.n == other.n
            and len(self.coeffs) == len(other.coeffs)
            and all(np.array_equal(a, b) for a, b in zip(self.coeffs, other.coeffs))
        )

    def __hash__(self):
        return hash((self.field, self.n, tuple(c.tobytes() for c in self.coeffs)))

    def left_multiply(self, B: np.ndarray) -> "MatrixPoly":
        """B * f, multiplying every coefficient on the left."""
        return MatrixPoly(self.field, [matmul(self.field, B, c) for c in self.coeffs], self.n)

    def to_list(self) -> list[list[list[int]]]:
        return [c.tolist() for c in self.coeffs]

    def __repr__(self):
        return f"MatrixPoly(n={self.n}, coeffs={self.to_list()})"


def right_eval(f: MatrixPoly, A: np.ndarray) -> np.ndarray:
    if A.shape != (f.n, f.n):
        raise ValueError(f"cannot evaluate an n={f.n} polynomial at a {A.shape} matrix")
    F = f.field
    acc = zeros(f.n, f.n)
    for c in reversed(f.coeffs):
        acc = F.vadd(matmul(F, acc, A), c)
    return acc


def scalar_right_multiply(f: MatrixPoly, g: Poly) -> MatrixPoly:
    """f * g for g with central scalar coefficients."""
    F = f.field
    if g.field != F:
        raise ValueError(f"field mismatch {g.field!r} vs {F!r}")
    if f.is_zero() or g.is_zero():
        return MatrixPoly(F, [], f.n)
    out = [zeros(f.n, f.n) for _ in range(f.degree + g.degree + 1)]
    for i, B in enumerate(f.coeffs):
        for j, c in enumerate(g.coeffs):
            if c:
                out[i + j] = F.vadd(out[i + j], F.vmul(np.int64(c), B))
    return MatrixPoly(F, out, f.n)


def minimal_polynomial(F: Field, A: np.ndarray) -> Poly:
    """Monic generator of {g : g(A) = 0}, by the first linear dependency among I, A, A^2, ..."""
    A = np.ascontiguousarray(A, dtype=np.int64)
    return _minpoly_cached(F, A.shape, A.tobytes())


@functools.lru_cache(maxsize=1 << 16)
def _minpoly_cached(F, shape, data):
    A = np.frombuffer(data, dtype=np.int64).reshape(shape)
    n = shape[0]
    powers = [identity(n).reshape(-1)]
    P = identity(n)
    for _ in range(n):
        P = matmul(F, P, A)
        powers.append(P.reshape(-1))
        ker = nullspace(F, np.array(powers).T)
        if not ker.is_zero():
            # the first dependency is unique up to scaling
            return Poly(F, ker.basis[0]).monic()
    raise AssertionError("no annihilating polynomial of degree <= n")


def mu_of_set(F: Field, S: Sequence[np.ndarray]) -> Poly:
    if len(S) == 0:
        raise ValueError("the minimal polynomial of an empty set is undefined")
    mu = Poly.const(F, 1)
    for A in S:
        mu = poly_lcm(mu, minimal_polynomial(F, A))
    return mu


def _right_mult_block(F: Field, M: np.ndarray) -> np.ndarray:
    """Matrix of B -> B M on row-major vec(B): kron(I, M^T)."""
    n = M.shape[0]
    out = np.zeros((n * n, n * n), dtype=np.int64)
    for i in range(n):
        out[i * n:(i + 1) * n, i * n:(i + 1) * n] = M.T
    return out


def annihilator_equations(F: Field, Ms: Sequence[np.ndarray]) -> np.ndarray:
    """Equations of sum_k B_k M_k = 0 in the stacked unknowns of B_0, ..., B_{d-1}."""
    return np.hstack([_right_mult_block(F, M) for M in Ms])


def _solve_stacked(F: Field, blocks, unknowns: int) -> Subspace:
    """Nullspace of the vertically stacked blocks, stopping once the rank is full."""
    R = np.zeros((0, unknowns), dtype=np.int64)
    for block in blocks:
        R, r, _ = rref(F, np.vstack([R, block]))
        R = R[:r]
        if r == unknowns:
            return Subspace.zero(F, unknowns)
    return nullspace(F, R)


def null_ideal_low_degree(F: Field, S: Sequence[np.ndarray]) -> Subspace:
    """Coefficient vectors of all f with deg f < deg mu_S and f(A) = 0 for every A in S.

    S is a core set exactly when this space is zero.
    """
    t = mu_of_set(F, S).degree
    n = S[0].shape[0]

    def blocks():
        for A in S:
            powers = [identity(n)]
            for _ in range(t - 1):
                powers.append(matmul(F, powers[-1], A))
            yield annihilator_equations(F, powers)

    return _solve_stacked(F, blocks(), t * n * n)


@dataclass(frozen=True, eq=False)
class BSpace:
    """{f : deg f < deg m_A - deg g, (f g)(A) = 0} as a space of stacked coefficient vectors."""

    A: np.ndarray
    g: Poly
    d: int
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    def members(self) -> list[MatrixPoly]:
        n = self.A.shape[0]
        return [MatrixPoly.from_vector(self.space.field, v, n, self.d) for v in self.space.basis]


def b_space(F: Field, A: np.ndarray, g: Poly) -> BSpace:
    m = minimal_polynomial(F, A)
    if g.field != F:
        g = g.embed(F)
    if not g.is_monic():
        raise ValueError(f"{g} is not monic")
    if not g.divides(m):
        raise ValueError(f"{g} does not divide the minimal polynomial {m}")
    d = m.degree - g.degree
    n = A.shape[0]
    if d == 0:
        return BSpace(A, g, 0, Subspace.zero(F, 0))
    gA = poly_at_matrix(g, A)
    Ms = [gA]
    for _ in range(d - 1):
        Ms.append(matmul(F, Ms[-1], A))
    eqs = annihilator_equations(F, Ms)
    return BSpace(A, g, d, nullspace(F, eqs))


@functools.lru_cache(maxsize=1 << 16)
def _b_space_cached(F, shape, data, g):
    A = np.frombuffer(data, dtype=np.int64).reshape(shape)
    return b_space(F, A, g)


def b_space_cached(F: Field, A: np.ndarray, g: Poly) -> BSpace:
    return _b_space_cached(F, A.shape, A.tobytes(), g)


def b_space_row_space(F: Field, A: np.ndarray, a: int) -> Subspace:
    """Row space of B(A, f_a), where f_a = m_A / (x - a); equals (Im f_a(A))^perp."""
    m = minimal_polynomial(F, A)
    lin = Poly.linear(F, a)
    if not lin.divides(m):
        raise ValueError(f"x - {a} does not divide {m}")
    fa = m.exact_div(lin)
    B = b_space(F, A, fa)
    n = A.shape[0]
    members = [c.coeffs[0] if not c.is_zero() else zeros(n, n) for c in B.members()]
    via_members = row_space_of_set(F, members) if members else Subspace.zero(F, n)
    via_image = orthocomplement(column_space(F, poly_at_matrix(fa, A)))
    if via_members != via_image:
        raise AssertionError(f"row space of B(A, f_a) differs from (Im f_a(A))^perp for A={A.tolist()}")
    return via_image
