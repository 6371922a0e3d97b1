"""Deciding whether a finite set of matrices is a core set.

Four routes are provided.  The oracle solves for matrix polynomials of degree
below deg mu_S that vanish on S; a nonzero solution is a non-core witness.
The factorwise route intersects the spaces B(A, m_A / p) for each irreducible
factor p of mu_S.  Within one similarity class the structural route checks
that the images of f_alpha(A) span K^n for every root alpha of every factor.
``is_pure_core`` applies the structural route to each class block.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .classes import (
    DEFAULT_BUDGET,
    ClassDescriptor,
    InvariantViolation,
    class_members,
    class_size,
    f_alpha_matrix,
    invariant_factors,
)
from .field import GF, Field, Poly, PrimeField, as_field, factorize
from .linalg import (
    Subspace,
    column_space,
    hyperplane_normals,
    orthocomplement,
    rref,
    subspace_intersection,
    subspace_sum,
)
from .matpoly import (
    MatrixPoly,
    b_space_cached,
    minimal_polynomial,
    mu_of_set,
    null_ideal_low_degree,
    right_eval,
    scalar_right_multiply,
)

CORE = "core"
NON_CORE = "non_core"


@dataclass
class FactorResult:
    factor: Poly
    multiplicity: int
    support: int
    b_dim: int | None = None
    image_dim: int | None = None
    passes: bool = True

    def to_dict(self) -> dict:
        return {
            "factor": self.factor.to_list(),
            "multiplicity": self.multiplicity,
            "support": self.support,
            "b_dim": self.b_dim,
            "image_dim": self.image_dim,
            "passes": self.passes,
        }

    @classmethod
    def from_dict(cls, F: Field, d: dict) -> "FactorResult":
        return cls(
            Poly(F, d["factor"]), d["multiplicity"], d["support"], d["b_dim"], d["image_dim"], d["passes"]
        )


@dataclass
class CoreReport:
    verdict: str
    mu: Poly
    method: str
    witness: MatrixPoly | None = None
    per_factor: list[FactorResult] = dc_field(default_factory=list)

    @property
    def is_core(self) -> bool:
        return self.verdict == CORE

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "method": self.method,
            "q": self.mu.field.q,
            "mu": self.mu.to_list(),
            "witness": None if self.witness is None else self.witness.to_list(),
            "per_factor": [f.to_dict() for f in self.per_factor],
        }

    @classmethod
    def from_dict(cls, d: dict, n: int) -> "CoreReport":
        F = GF(d["q"])
        witness = None if d["witness"] is None else MatrixPoly(F, d["witness"], n)
        return cls(
            d["verdict"],
            Poly(F, d["mu"]),
            d["method"],
            witness,
            [FactorResult.from_dict(F, f) for f in d["per_factor"]],
        )

    def __eq__(self, other):
        return isinstance(other, CoreReport) and self.to_dict() == other.to_dict()


def _prepare(F, S: Iterable) -> tuple[PrimeField, list[np.ndarray]]:
    F = as_field(F)
    if not isinstance(F, PrimeField):
        raise ValueError("core-set decisions take matrices over GF(q)")
    seen = {}
    for A in S:
        A = np.ascontiguousarray(A, dtype=np.int64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"expected square matrices, got shape {A.shape}")
        if A.size and (A.min() < 0 or A.max() >= F.q):
            raise ValueError(f"matrix entries out of range for GF({F.q})")
        seen.setdefault(A.tobytes() + bytes([A.shape[0]]), A)
    mats = list(seen.values())
    if len({A.shape for A in mats}) > 1:
        raise ValueError("matrices of different sizes")
    return F, mats


def _verify_witness(F: Field, S: Sequence[np.ndarray], w: MatrixPoly, t: int) -> MatrixPoly:
    if w.is_zero() or w.degree >= t:
        raise InvariantViolation(f"witness of degree {w.degree} is not below deg mu = {t}")
    for A in S:
        if right_eval(w, A).any():
            raise InvariantViolation(f"witness does not vanish at {A.tolist()}")
    return w


def is_core_oracle(F, S: Iterable[np.ndarray]) -> CoreReport:
    F, S = _prepare(F, S)
    if not S:
        raise ValueError("the oracle needs a nonempty set")
    mu = mu_of_set(F, S)
    space = null_ideal_low_degree(F, S)
    if space.is_zero():
        return CoreReport(CORE, mu, "oracle")
    n = S[0].shape[0]
    w = MatrixPoly.from_vector(F, space.basis[0], n, mu.degree)
    return CoreReport(NON_CORE, mu, "oracle", _verify_witness(F, S, w, mu.degree))


@functools.lru_cache(maxsize=1 << 16)
def _perp(V: Subspace) -> Subspace:
    return orthocomplement(V)


def _intersection(spaces: Sequence[Subspace]) -> Subspace:
    """Intersection through the sum of complements, stopping once that sum is everything."""
    F, m = spaces[0].field, spaces[0].n
    R = np.zeros((0, m), dtype=np.int64)
    for V in spaces:
        P = _perp(V)
        if P.is_zero():
            continue
        R, r, _ = rref(F, np.vstack([R, P.matrix()]))
        R = R[:r]
        if r == m:
            return Subspace.zero(F, m)
    return orthocomplement(Subspace.span(F, R, m))


def _b_intersection(F: PrimeField, S: Sequence[np.ndarray], p: Poly, mu: Poly | None) -> Subspace:
    """cap_A B(A, g_A / p) with g_A = mu if given, else m_A."""
    spaces = []
    for A in S:
        g = mu if mu is not None else minimal_polynomial(F, A)
        spaces.append(b_space_cached(F, A, g.exact_div(p)).space)
    return _intersection(spaces)


def _factor_witness(F, S, mu: Poly, p: Poly, inter: Subspace) -> MatrixPoly:
    n = S[0].shape[0]
    f = MatrixPoly.from_vector(F, inter.basis[0], n, p.degree)
    return _verify_witness(F, S, scalar_right_multiply(f, mu.exact_div(p)), mu.degree)


def is_core_factorwise(F, S: Iterable[np.ndarray]) -> CoreReport:
    F, S = _prepare(F, S)
    if not S:
        raise ValueError("the factorwise test needs a nonempty set")
    mu = mu_of_set(F, S)
    results = []
    witness = None
    for p, c in factorize(mu):
        pc = p**c
        Sp = [A for A in S if pc.divides(minimal_polynomial(F, A))]
        inter = _b_intersection(F, Sp, p, None)
        ok = inter.is_zero()
        results.append(FactorResult(p, c, len(Sp), b_dim=inter.dim, passes=ok))
        if not ok and witness is None:
            witness = _factor_witness(F, S, mu, p, inter)
    verdict = CORE if witness is None else NON_CORE
    return CoreReport(verdict, mu, "factorwise", witness, results)


def _single_class(F: PrimeField, S: Sequence[np.ndarray]) -> tuple[Poly, ...]:
    labels = {invariant_factors(F, A) for A in S}
    if len(labels) != 1:
        raise ValueError(f"set meets {len(labels)} similarity classes; expected one")
    return labels.pop()


def _image_sum(K: Field, images: Iterable[np.ndarray], n: int) -> int:
    """dim of the sum of column spaces, stopping once it reaches n."""
    R = np.zeros((0, n), dtype=np.int64)
    seen = set()
    r = 0
    for M in images:
        key = M.tobytes()
        if key in seen:
            continue
        seen.add(key)
        R, r, _ = rref(K, np.vstack([R, M.T]))
        R = R[:r]
        if r == n:
            break
    return r


def linear_factor_test(F, S: Iterable[np.ndarray], a: int) -> tuple[bool, int]:
    """Does sum_{A in S} Im f_a(A) fill F^n?  Cross-checked against cap (Im f_a(A))^perp = 0."""
    F, S = _prepare(F, S)
    if not S:
        raise ValueError("empty set")
    chain = _single_class(F, S)
    mu = chain[-1]
    p = Poly.linear(F, a)
    if not p.divides(mu):
        raise ValueError(f"x - {a} does not divide {mu}")
    images = [column_space(F, f_alpha_matrix(F.q, A, mu, p)[1]) for A in S]
    total = subspace_sum(images)
    dual = subspace_intersection([_perp(V) for V in images])
    if orthocomplement(dual) != total:
        raise InvariantViolation("image sum and complement intersection disagree")
    return total.is_full(), total.dim


def higher_factor_test(
    F, S: Iterable[np.ndarray], p: Poly, root_index: int = 0, check_conjugate: bool = False
) -> tuple[bool, int]:
    """Does sum_{A in S} Im_K f_alpha(A) fill K^n, alpha a root of the irreducible p?"""
    F, S = _prepare(F, S)
    if not S:
        raise ValueError("empty set")
    if p.degree < 2:
        raise ValueError("use linear_factor_test for linear factors")
    chain = _single_class(F, S)
    mu = chain[-1]
    if len(factorize(p.monic())) != 1 or factorize(p.monic())[0][1] != 1:
        raise ValueError(f"{p} is reducible")
    if not p.divides(mu):
        raise ValueError(f"{p} does not divide {mu}")
    n = S[0].shape[0]
    K = None
    mats = []
    for A in S:
        K, M = f_alpha_matrix(F.q, A, mu, p, root_index)
        mats.append(M)
    dim = _image_sum(K, mats, n)
    if check_conjugate:
        other = (root_index + 1) % p.degree
        mats2 = [f_alpha_matrix(F.q, A, mu, p, other)[1] for A in S]
        if (_image_sum(K, mats2, n) == n) != (dim == n):
            raise InvariantViolation("verdict depends on the choice of root")
    return dim == n, dim


def is_core_structural(F, S: Iterable[np.ndarray]) -> CoreReport:
    """Per-factor image-sum test for a subset of one similarity class."""
    F, S = _prepare(F, S)
    if not S:
        raise ValueError("empty set")
    chain = _single_class(F, S)
    mu = chain[-1]
    n = S[0].shape[0]
    results = []
    witness = None
    for p, c in factorize(mu):
        if p.degree == 1:
            ok, dim = linear_factor_test(F, S, F.neg(p.coeffs[0]))
        else:
            ok, dim = higher_factor_test(F, S, p)
        results.append(FactorResult(p, c, len(S), image_dim=dim, passes=ok))
        if not ok and witness is None:
            inter = _b_intersection(F, S, p, mu)
            if inter.is_zero():
                raise InvariantViolation(f"image sum for {p} is {dim} < {n} but B-intersection is zero")
            results[-1].b_dim = inter.dim
            witness = _factor_witness(F, S, mu, p, inter)
    verdict = CORE if witness is None else NON_CORE
    return CoreReport(verdict, mu, "structural", witness, results)


@dataclass
class PureCoreReport:
    pure: bool
    blocks: list[tuple[ClassDescriptor, CoreReport]]

    def to_dict(self) -> dict:
        return {
            "pure_core": self.pure,
            "blocks": [
                {"class": desc.to_list(), "report": rep.to_dict()} for desc, rep in self.blocks
            ],
        }


def is_pure_core(F, S: Iterable[np.ndarray]) -> PureCoreReport:
    F, S = _prepare(F, S)
    groups: dict[tuple[Poly, ...], list[np.ndarray]] = {}
    for A in S:
        groups.setdefault(invariant_factors(F, A), []).append(A)
    blocks = []
    for chain in sorted(groups, key=lambda ch: tuple(f.sort_key() for f in ch)):
        block = groups[chain]
        desc = ClassDescriptor(block[0].shape[0], F.q, chain)
        try:
            rep = is_core_structural(F, block)
        except ValueError:
            rep = is_core_oracle(F, block)
        blocks.append((desc, rep))
    return PureCoreReport(all(r.is_core for _, r in blocks), blocks)


@dataclass
class TrapReport:
    """How many class members have f_alpha-image inside a hyperplane of K^n."""

    desc: ClassDescriptor
    factor: Poly
    applicable: bool
    class_size: int
    coordinate_trap: int = 0
    max_trap: int = 0
    hyperplanes: int = 0
    bound: Fraction = Fraction(0)

    @property
    def within_bound(self) -> bool:
        return self.max_trap <= self.bound


def _left_null_count(K: Field, mats: np.ndarray, w: Sequence[int]) -> int:
    acc = np.zeros((mats.shape[0], mats.shape[2]), dtype=np.int64)
    for k, wk in enumerate(w):
        if wk:
            acc = K.vadd(acc, K.vmul(np.int64(wk), mats[:, k, :]))
    return int(np.count_nonzero(~acc.any(axis=1)))


def trap_set_analysis(desc: ClassDescriptor, p: Poly, budget: int = DEFAULT_BUDGET) -> TrapReport:
    """Count members A with Im f_alpha(A) inside a hyperplane V of K^n.

    ``coordinate_trap`` uses V = {x : x_n = 0}; ``max_trap`` is the maximum over
    every hyperplane, which is the largest non-core subset living on the
    factor p.  Both must stay below 4|C|/q.
    """
    if not p.divides(desc.mu):
        raise ValueError(f"{p} does not divide {desc.mu}")
    size = class_size(desc, budget)
    bound = Fraction(4 * size, desc.q)
    if desc.t == 1:
        return TrapReport(desc, p, False, size, bound=bound)
    members = list(class_members(desc, budget))
    K = None
    mats = []
    for A in members:
        K, M = f_alpha_matrix(desc.q, A, desc.mu, p)
        mats.append(M)
    stack = np.array(mats, dtype=np.int64)
    n = desc.n
    coord = _left_null_count(K, stack, [0] * (n - 1) + [1])
    best = 0
    count = 0
    for w in hyperplane_normals(K, n):
        best = max(best, _left_null_count(K, stack, w))
        count += 1
    report = TrapReport(desc, p, True, size, coord, best, count, bound)
    if not report.within_bound:
        raise InvariantViolation(f"trap of size {best} exceeds 4|C|/q = {bound} in {desc}")
    return report
