from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nullcore.coreset import is_pure_core
from nullcore.experiments import (
    RandomSubsetModel,
    bound_sweep,
    chernoff_tail_check,
    constant_bound_check,
    constant_prefixes,
    decider_for,
    draw_subset,
    exact_pure_core_probability,
    monte_carlo_pure_core,
    trial_rng,
    wilson_interval,
)
from nullcore.field import GF


def test_wilson_known():
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-4) and hi == pytest.approx(0.5962, abs=1e-4)
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0


def test_trial_streams_are_reproducible():
    a = trial_rng(9, 3).random(5)
    assert (a == trial_rng(9, 3).random(5)).all()
    assert not (a == trial_rng(9, 4).random(5)).all()


@pytest.mark.parametrize("q", [2, 3])
def test_decider_agrees_with_is_pure_core(q):
    model = RandomSubsetModel(q=q, n=2, seed=11, trials=40)
    decider = decider_for(2, q)
    for t in range(model.trials):
        mask = trial_rng(model.seed, t).random(decider.size) < model.density
        S = draw_subset(model, t)
        if len(S) == 0:
            continue
        assert decider.is_pure_core(mask) == is_pure_core(GF(q), S).pure


def test_monte_carlo_deterministic():
    m = RandomSubsetModel(q=2, seed=42, trials=300)
    a, b = monte_carlo_pure_core(m), monte_carlo_pure_core(m)
    assert (a.successes, a.ci_low) == (b.successes, b.ci_low)


def test_monte_carlo_contains_exact_probability():
    exact = float(exact_pure_core_probability(2, 2))
    row = monte_carlo_pure_core(RandomSubsetModel(q=2, seed=3, trials=2000))
    assert row.ci_low <= exact <= row.ci_high


def test_monte_carlo_validation():
    with pytest.raises(ValueError):
        monte_carlo_pure_core(RandomSubsetModel(q=2, density=0))
    with pytest.raises(ValueError):
        monte_carlo_pure_core(RandomSubsetModel(q=13, n=3), budget=1 << 20)


def test_exact_probability_m2_f2():
    # independent count: every subset of every class through the oracle
    from itertools import combinations

    from nullcore.classes import ring_catalog
    from nullcore.coreset import is_core_oracle

    cat = ring_catalog(2, 2)
    expected = Fraction(1)
    for idx in cat.members:
        members = cat.matrices[idx]
        core = 1  # the empty subset
        for k in range(1, len(members) + 1):
            core += sum(is_core_oracle(GF(2), members[list(c)]).is_core for c in combinations(range(len(members)), k))
        expected *= Fraction(core, 2 ** len(members))
    assert exact_pure_core_probability(2, 2) == expected == Fraction(2 * 2 * 5 * 52 * 5 * 2, 2**16)


@given(st.integers(1, 400), st.floats(0.01, 0.99))
def test_chernoff_never_fires(N, c):
    tail, bound = chernoff_tail_check(N, c)
    assert 0 <= float(tail) <= bound + 1e-15


def test_chernoff_example():
    tail, bound = chernoff_tail_check(100, 0.5)
    assert float(tail) == pytest.approx(2.818e-7, rel=1e-3)
    assert bound == pytest.approx(np.exp(-6.25))
    with pytest.raises(ValueError):
        chernoff_tail_check(100, 1.0)


def test_constant_prefixes():
    pre = constant_prefixes(2, 3)
    assert pre == [Fraction(2), Fraction(8, 3), Fraction(64, 21)]
    assert 3.46 <= float(constant_bound_check(2, 30)) <= 3.47
    for q in (3, 5, 7):
        assert constant_prefixes(q, 40)[-1] < constant_prefixes(2, 40)[-1]


def test_bound_sweep_m2_f2():
    sweep = bound_sweep(2, 2)
    assert not sweep.partial and sweep.violations == 0
    assert all(r.max_noncore is not None for r in sweep.rows)


def test_bound_sweep_budget_partial():
    assert bound_sweep(3, 3, budget=1000).partial
