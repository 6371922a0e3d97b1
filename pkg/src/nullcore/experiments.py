"""Quantitative experiments: pure-core density, tail bounds, the constant C, trap sweeps."""

from __future__ import annotations

import itertools
import math
import statistics
import time
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .classes import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    InvariantViolation,
    RingCatalog,
    count_formula,
    f_alpha_image,
    image_equivalence_partition,
    ring_catalog,
)
from .coreset import is_core_oracle, trap_set_analysis
from .field import GF
from .linalg import rref

Z95 = statistics.NormalDist().inv_cdf(0.975)


@dataclass
class RandomSubsetModel:
    q: int
    n: int = 2
    density: float = 0.5
    seed: int = 0
    trials: int = 2000


@dataclass
class SweepRow:
    q: int
    n: int
    trials: int
    successes: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int
    density: float = 0.5
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


CSV_FIELDS = ["q", "n", "trials", "successes", "estimate", "ci_low", "ci_high", "seed"]


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial, independent of the order trials run in."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


@dataclass
class _FactorImages:
    n: int
    field: object
    ids: np.ndarray  # image id of each class member
    bases: list[np.ndarray]  # basis rows of each distinct image


@dataclass
class _ClassImages:
    scalar: bool
    factors: list[_FactorImages] = dc_field(default_factory=list)


class PureCoreDecider:
    """Per-ring precomputation of every f_alpha image, for fast repeated pure-core decisions.

    Decisions agree with :func:`nullcore.coreset.is_pure_core`; the images are
    the same ones the structural test computes, looked up instead of rebuilt.
    """

    def __init__(self, n: int, q: int, budget: int = DEFAULT_BUDGET):
        self.catalog: RingCatalog = ring_catalog(n, q, budget)
        self.n, self.q = n, q
        self.classes: list[_ClassImages] = []
        for desc, idx in zip(self.catalog.classes, self.catalog.members):
            info = _ClassImages(desc.is_scalar())
            if not info.scalar:
                for p, _ in desc.factors:
                    keys: dict[tuple, int] = {}
                    ids = np.empty(len(idx), dtype=np.int64)
                    bases = []
                    field = None
                    for k, A in enumerate(self.catalog.matrices[idx]):
                        V = f_alpha_image(q, A, desc.mu, p)
                        field = V.field
                        if V.basis not in keys:
                            keys[V.basis] = len(bases)
                            bases.append(V.matrix())
                        ids[k] = keys[V.basis]
                    info.factors.append(_FactorImages(n, field, ids, bases))
            self.classes.append(info)

    @property
    def size(self) -> int:
        return len(self.catalog.matrices)

    def class_is_core(self, ci: int, local: np.ndarray) -> bool:
        """Is the subset (local member indices) of class ci a core set?"""
        info = self.classes[ci]
        if local.size == 0 or info.scalar:
            return True
        for fac in info.factors:
            distinct = np.unique(fac.ids[local])
            R = np.zeros((0, self.n), dtype=np.int64)
            r = 0
            for i in distinct:
                R, r, _ = rref(fac.field, np.vstack([R, fac.bases[i]]))
                R = R[:r]
                if r == self.n:
                    break
            if r < self.n:
                return False
        return True

    def is_pure_core(self, mask: np.ndarray) -> bool:
        for ci, idx in enumerate(self.catalog.members):
            local = np.flatnonzero(mask[idx])
            if not self.class_is_core(ci, local):
                return False
        return True


_deciders: dict[tuple[int, int], PureCoreDecider] = {}


def decider_for(n: int, q: int, budget: int = DEFAULT_BUDGET) -> PureCoreDecider:
    key = (n, q)
    if key not in _deciders:
        _deciders[key] = PureCoreDecider(n, q, budget)
    return _deciders[key]


def monte_carlo_pure_core(model: RandomSubsetModel, budget: int = DEFAULT_BUDGET) -> SweepRow:
    """Estimate P(S is a pure core set) for S drawn by independent inclusion."""
    if not 0 < model.density <= 1:
        raise ValueError("density must lie in (0, 1]")
    if model.trials < 1:
        raise ValueError("need at least one trial")
    try:
        decider = decider_for(model.n, model.q, budget)
    except BudgetExceeded as exc:
        raise ValueError(f"infeasible (n, q) = ({model.n}, {model.q}): {exc}") from exc
    start = time.perf_counter()
    hits = 0
    for trial in range(model.trials):
        mask = trial_rng(model.seed, trial).random(decider.size) < model.density
        hits += decider.is_pure_core(mask)
    lo, hi = wilson_interval(hits, model.trials)
    return SweepRow(
        model.q,
        model.n,
        model.trials,
        hits,
        hits / model.trials,
        lo,
        hi,
        model.seed,
        model.density,
        time.perf_counter() - start,
    )


def draw_subset(model: RandomSubsetModel, trial: int) -> np.ndarray:
    """The matrices of trial ``trial`` (same stream as the Monte Carlo loop)."""
    decider = decider_for(model.n, model.q)
    mask = trial_rng(model.seed, trial).random(decider.size) < model.density
    return decider.catalog.matrices[mask]


def core_subset_counts(n: int, q: int, max_class_size: int = 16) -> list[tuple[int, int]]:
    """(core subsets including the empty one, class size) for every class, by full enumeration."""
    decider = decider_for(n, q)
    out = []
    for ci, idx in enumerate(decider.catalog.members):
        size = len(idx)
        if size > max_class_size:
            raise BudgetExceeded(f"class of size {size} has too many subsets")
        count = 0
        for bits in range(1 << size):
            local = np.array([k for k in range(size) if bits >> k & 1], dtype=np.int64)
            count += decider.class_is_core(ci, local)
        out.append((count, size))
    return out


def exact_pure_core_probability(n: int, q: int) -> Fraction:
    prob = Fraction(1)
    for count, size in core_subset_counts(n, q):
        prob *= Fraction(count, 2**size)
    return prob


def chernoff_tail_check(N: int, c: float) -> tuple[Fraction, float]:
    """Exact P(Bin(N, 1/2) <= N(1-c)/2) next to exp(-c^2 N / 4)."""
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")
    if N < 1 or N > 10_000:
        raise ValueError("N must lie in [1, 10000]")
    kmax = math.floor(Fraction(N) * (1 - Fraction(c)) / 2)
    tail = Fraction(sum(math.comb(N, k) for k in range(kmax + 1)), 2**N)
    log_bound = -c * c * N / 4
    if tail and math.log(tail.numerator) - math.log(tail.denominator) > log_bound:
        raise InvariantViolation(f"tail {float(tail)} exceeds exp({log_bound}) at N={N}, c={c}")
    return tail, math.exp(log_bound)


def constant_prefixes(q: int, terms: int) -> list[Fraction]:
    """prod_{i<=k} 1/(1 - q^-i) for k = 1..terms, exactly."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    out = []
    value = Fraction(1)
    for i in range(1, terms + 1):
        value /= 1 - Fraction(1, q**i)
        out.append(value)
    return out


def constant_bound_check(q: int, terms: int) -> Fraction:
    prefixes = constant_prefixes(q, terms)
    for a, b in zip(prefixes, prefixes[1:]):
        if not a < b:
            raise InvariantViolation("prefix products are not increasing")
    if prefixes[-1] >= 4:
        raise InvariantViolation(f"prefix product {float(prefixes[-1])} reached 4")
    return prefixes[-1]


@dataclass
class BoundRow:
    cls: str
    factor: str
    class_size: int
    coordinate_trap: int
    max_trap: int
    hyperplanes: int
    bound: Fraction
    max_noncore: int | None = None

    @property
    def ok(self) -> bool:
        ok = self.max_trap <= self.bound
        if self.max_noncore is not None:
            ok = ok and self.max_noncore <= self.bound
        return ok


@dataclass
class BoundSweep:
    n: int
    q: int
    rows: list[BoundRow]
    partial: bool = False

    @property
    def violations(self) -> int:
        return sum(not r.ok for r in self.rows)


def max_noncore_subset(n: int, q: int, ci: int) -> int:
    """Largest non-core subset of class ci, found by deciding every subset with the oracle."""
    cat = ring_catalog(n, q)
    members = cat.matrices[cat.members[ci]]
    F = GF(q)
    best = 0
    for k in range(len(members), 0, -1):
        for combo in itertools.combinations(range(len(members)), k):
            if not is_core_oracle(F, members[list(combo)]).is_core:
                return k
    return best


def bound_sweep(n: int, q: int, budget: int = DEFAULT_BUDGET, exhaustive_limit: int = 8) -> BoundSweep:
    """Trap counts against 4|C|/q for every non-scalar class and factor.

    Classes with at most ``exhaustive_limit`` members additionally have every
    subset decided by the oracle.
    """
    try:
        cat = ring_catalog(n, q, budget)
    except BudgetExceeded:
        return BoundSweep(n, q, [], partial=True)
    rows = []
    partial = False
    for ci, desc in enumerate(cat.classes):
        if desc.is_scalar():
            continue
        exhaustive = None
        if len(cat.members[ci]) <= exhaustive_limit:
            exhaustive = max_noncore_subset(n, q, ci)
        for p, _ in desc.factors:
            try:
                rep = trap_set_analysis(desc, p, budget)
            except BudgetExceeded:
                partial = True
                continue
            rows.append(
                BoundRow(
                    str(desc),
                    str(p),
                    rep.class_size,
                    rep.coordinate_trap,
                    rep.max_trap,
                    rep.hyperplanes,
                    rep.bound,
                    exhaustive,
                )
            )
    return BoundSweep(n, q, rows, partial)


ATLAS_FIELDS = [
    "class",
    "mu",
    "class_size",
    "factor",
    "multiplicity",
    "s",
    "r",
    "buckets",
    "bucket_size",
    "formula_count",
    "formula_size",
    "formula_ok",
    "trap_coordinate",
    "trap_max",
    "bound_4C_over_q",
]


def atlas_rows(n: int, q: int, budget: int = DEFAULT_BUDGET, bounds: bool = True) -> list[dict]:
    """One row per (class, irreducible factor of mu)."""
    cat = ring_catalog(n, q, budget)
    rows = []
    for ci, desc in enumerate(cat.classes):
        size = len(cat.members[ci])
        for p, c in desc.factors:
            part = image_equivalence_partition(desc, p, budget)
            try:
                count, ratio = count_formula(n, q, part.r, part.s)
                formula_size = ratio * size
                formula_ok = count == part.class_count and formula_size == part.each_size
            except ValueError:
                count, formula_size, formula_ok = None, None, False
            row = {
                "class": str(desc),
                "mu": str(desc.mu),
                "class_size": size,
                "factor": str(p),
                "multiplicity": c,
                "s": part.s,
                "r": part.r,
                "buckets": part.class_count,
                "bucket_size": part.each_size,
                "formula_count": count,
                "formula_size": None if formula_size is None else str(formula_size),
                "formula_ok": formula_ok,
                "trap_coordinate": None,
                "trap_max": None,
                "bound_4C_over_q": None,
            }
            if bounds and not desc.is_scalar():
                trap = trap_set_analysis(desc, p, budget)
                row["trap_coordinate"] = trap.coordinate_trap
                row["trap_max"] = trap.max_trap
                row["bound_4C_over_q"] = str(trap.bound)
            rows.append(row)
    return rows
