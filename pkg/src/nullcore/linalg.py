"""Dense exact linear algebra over GF(q) and its extensions.

Matrices are int64 numpy arrays of field codes.  Subspaces of the column space
K^n are kept as the reduced row echelon basis of row vectors, which makes
equality of subspaces the same as equality of stored bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .field import ExtensionField, Field, FieldMismatchError, as_field


def asmatrix(F: Field, M, shape: tuple[int, int] | None = None) -> np.ndarray:
    arr = np.array(M, dtype=np.int64)
    if arr.ndim == 1 and shape is not None:
        arr = arr.reshape(shape)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    if shape is not None and arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= F.order):
        raise ValueError(f"entries out of range for {F!r}")
    return arr


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def matmul(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} x {B.shape}")
    if isinstance(F, ExtensionField) and F.degree > 1:
        acc = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for k in range(A.shape[1]):
            acc = F.vadd(acc, F.vmul(A[:, k, None], B[None, k, :]))
        return acc
    return (A @ B) % F.char


def matadd(F: Field, A, B):
    return F.vadd(A, B)


def matsub(F: Field, A, B):
    return F.vsub(A, B)


def scalar_mul(F: Field, c: int, A):
    return F.vmul(np.int64(c), A)


def matpow(F: Field, A: np.ndarray, e: int) -> np.ndarray:
    result = identity(A.shape[0])
    base = A
    while e:
        if e & 1:
            result = matmul(F, result, base)
        base = matmul(F, base, base)
        e >>= 1
    return result


def poly_at_matrix(f, A: np.ndarray) -> np.ndarray:
    """Evaluate a scalar polynomial at a square matrix by Horner's rule."""
    F = f.field
    n = A.shape[0]
    acc = zeros(n, n)
    for c in reversed(f.coeffs):
        acc = matmul(F, acc, A)
        acc = F.vadd(acc, scalar_mul(F, c, identity(n)))
    return acc


def rref(F: Field, M) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form.

    Returns (R, rank, pivot columns).  Pivots are taken as the first nonzero
    entry of each column, scanning rows top to bottom, and scaled to 1.
    """
    R = np.array(M, dtype=np.int64)
    if R.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = R.shape
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            R[[r, p]] = R[[p, r]]
        lead = int(R[r, c])
        if lead != 1:
            R[r] = F.vmul(np.int64(F.inv(lead)), R[r])
        col = R[:, c].copy()
        col[r] = 0
        idx = np.flatnonzero(col)
        if idx.size:
            R[idx] = F.vsub(R[idx], F.vmul(col[idx, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, r, pivots


def rank(F: Field, M) -> int:
    return rref(F, M)[1]


def det_batch(F: Field, Ms: np.ndarray) -> np.ndarray:
    """Determinants of a stack of small square matrices (Leibniz expansion)."""
    n = Ms.shape[-1]
    total = np.zeros(Ms.shape[:-2], dtype=np.int64)
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = np.ones(Ms.shape[:-2], dtype=np.int64)
        for i, j in enumerate(perm):
            term = F.vmul(term, Ms[..., i, j])
        total = F.vsub(total, term) if inversions % 2 else F.vadd(total, term)
    return total


def inverse(F: Field, A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    R, r, _ = rref(F, np.hstack([A, identity(n)]))
    if r < n or not np.array_equal(R[:, :n], identity(n)):
        raise ZeroDivisionError("matrix is singular")
    return R[:, n:]


def is_invertible(F: Field, A: np.ndarray) -> bool:
    return rank(F, A) == A.shape[0]


@dataclass(frozen=True)
class Subspace:
    """Subspace of K^n, held as a canonical RREF basis of row vectors."""

    field: Field
    n: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, F: Field, vectors, n: int) -> "Subspace":
        F = as_field(F)
        arr = np.array(vectors, dtype=np.int64).reshape(-1, n)
        if arr.shape[0] == 0:
            return cls(F, n, ())
        R, r, _ = rref(F, arr)
        return cls(F, n, tuple(tuple(int(x) for x in row) for row in R[:r]))

    @classmethod
    def zero(cls, F: Field, n: int) -> "Subspace":
        return cls(as_field(F), n, ())

    @classmethod
    def full(cls, F: Field, n: int) -> "Subspace":
        return cls(as_field(F), n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.n

    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(self.dim, self.n)

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64).reshape(1, self.n)
        return rank(self.field, np.vstack([self.matrix(), v])) == self.dim

    def issubset(self, other: "Subspace") -> bool:
        _compatible([self, other])
        return subspace_sum([self, other]).dim == other.dim

    def __le__(self, other: "Subspace") -> bool:
        return self.issubset(other)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, n={self.n}, basis={[list(b) for b in self.basis]})"


def _compatible(Vs: Sequence[Subspace]):
    if not Vs:
        raise ValueError("empty family of subspaces")
    F, n = Vs[0].field, Vs[0].n
    for V in Vs:
        if V.n != n:
            raise ValueError(f"ambient dimension mismatch: {V.n} vs {n}")
        if V.field != F:
            raise FieldMismatchError(f"{V.field!r} vs {F!r}")
    return F, n


def column_space(F: Field, M: np.ndarray) -> Subspace:
    return Subspace.span(F, np.asarray(M).T, M.shape[0])


def row_space(F: Field, M: np.ndarray) -> Subspace:
    return Subspace.span(F, M, M.shape[1])


def nullspace(F: Field, M: np.ndarray) -> Subspace:
    """{x : M x = 0} in canonical form."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return Subspace.full(F, cols)
    R, r, pivots = rref(F, M)
    free = [c for c in range(cols) if c not in set(pivots)]
    if not free:
        return Subspace.zero(F, cols)
    vecs = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        vecs[k, f] = 1
        for i, p in enumerate(pivots):
            vecs[k, p] = F.neg(int(R[i, f]))
    return Subspace.span(F, vecs, cols)


def subspace_sum(Vs: Iterable[Subspace]) -> Subspace:
    Vs = list(Vs)
    F, n = _compatible(Vs)
    rows = [b for V in Vs for b in V.basis]
    if not rows:
        return Subspace.zero(F, n)
    return Subspace.span(F, rows, n)


def orthocomplement(V: Subspace) -> Subspace:
    """{x : x^T y = 0 for every y in V} (plain bilinear form, no conjugation)."""
    if V.is_zero():
        return Subspace.full(V.field, V.n)
    return nullspace(V.field, V.matrix())


def subspace_intersection(Vs: Iterable[Subspace]) -> Subspace:
    """Intersection through (cap V_i)^perp = sum V_i^perp."""
    Vs = list(Vs)
    _compatible(Vs)
    return orthocomplement(subspace_sum([orthocomplement(V) for V in Vs]))


def row_space_of_set(F: Field, S: Sequence[np.ndarray]) -> Subspace:
    if len(S) == 0:
        raise ValueError("row space of an empty set is undefined")
    shapes = {np.shape(A) for A in S}
    if len(shapes) != 1:
        raise ValueError(f"members have different shapes: {sorted(shapes)}")
    return Subspace.span(F, np.vstack(S), S[0].shape[1])


def extend_scalars(V: Subspace, K: ExtensionField) -> Subspace:
    if V.field != K.base:
        raise FieldMismatchError(f"{V.field!r} is not the base field of {K!r}")
    # a base-field RREF basis is already in K-canonical form
    return Subspace(K, V.n, V.basis)


def restrict_to_base(V: Subspace) -> Subspace:
    """V cap F^n for V a subspace of K^n."""
    K = V.field
    if not isinstance(K, ExtensionField):
        return V
    s = K.degree
    # x in F^n lies in V iff w^T x = 0 for all w in V^perp; split each w into base coordinates
    perp = orthocomplement(V)
    if perp.is_zero():
        return Subspace.full(K.base, V.n)
    rows = []
    for w in perp.basis:
        digits = [K.coords(c) for c in w]
        for j in range(s):
            rows.append([d[j] for d in digits])
    return nullspace(K.base, np.array(rows, dtype=np.int64))


def complement_basis(F: Field, V: Subspace) -> np.ndarray:
    """Rows completing V's basis to a basis of F^n (standard vectors at non-pivot columns)."""
    _, _, pivots = rref(F, V.matrix()) if V.dim else (None, 0, [])
    rest = [c for c in range(V.n) if c not in set(pivots)]
    out = np.zeros((len(rest), V.n), dtype=np.int64)
    for k, c in enumerate(rest):
        out[k, c] = 1
    return out


def hyperplane_normals(F: Field, n: int):
    """One normal vector per hyperplane of F^n (first nonzero coordinate equal to 1)."""
    for lead in range(n):
        tail = n - lead - 1
        for code in range(F.order**tail):
            v = [0] * n
            v[lead] = 1
            c = code
            for j in range(lead + 1, n):
                v[j] = c % F.order
                c //= F.order
            yield tuple(v)
