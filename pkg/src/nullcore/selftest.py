"""Fast invariant checks runnable from the command line."""

from __future__ import annotations

import itertools

from .classes import count_formula, enumerate_classes, image_equivalence_partition, ring_catalog
from .coreset import is_core_factorwise, is_core_oracle, is_core_structural
from .experiments import chernoff_tail_check, constant_bound_check
from .field import GF


def _oracle_equivalence() -> bool:
    F = GF(2)
    cat = ring_catalog(2, 2)
    for idx in cat.members:
        members = cat.matrices[idx]
        for k in range(1, len(members) + 1):
            for combo in itertools.combinations(range(len(members)), k):
                S = members[list(combo)]
                verdicts = {
                    is_core_oracle(F, S).verdict,
                    is_core_factorwise(F, S).verdict,
                    is_core_structural(F, S).verdict,
                }
                if len(verdicts) != 1:
                    return False
    return True


def _class_count() -> bool:
    return all(
        len(enumerate_classes(n, q)) == len(ring_catalog(n, q).classes) for n, q in [(2, 2), (2, 3), (3, 2)]
    )


def _counting() -> bool:
    for n, q in [(2, 2), (2, 3), (3, 2)]:
        for desc in ring_catalog(n, q).classes:
            for p, _ in desc.factors:
                part = image_equivalence_partition(desc, p)
                count, _ = count_formula(n, q, part.r, part.s)
                if count != part.class_count:
                    return False
    return True


def _bounds() -> bool:
    constant_bound_check(2, 50)
    for N in (10, 100, 1000):
        for c in (0.1, 0.5, 0.9):
            chernoff_tail_check(N, c)
    return True


CHECKS = [
    ("oracle/factorwise/structural agree on M_2(F_2)", _oracle_equivalence),
    ("class enumeration matches brute force", _class_count),
    ("bucket counts match the counting formula", _counting),
    ("constant and tail bounds", _bounds),
]


def run(verbose: bool = False) -> bool:
    ok = True
    for name, check in CHECKS:
        try:
            passed = bool(check())
        except AssertionError:
            passed = False
        ok = ok and passed
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
