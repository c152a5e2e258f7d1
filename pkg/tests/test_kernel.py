import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapdb import kernel
from shapdb.errors import CapExceeded, PreconditionError
from shapdb.kernel import CoalitionGame

from instances import shapley_by_permutations, shapley_by_subsets


def table_game(n, table):
    players = tuple(range(1, n + 1))

    def utility(s):
        mask = sum(1 << (p - 1) for p in s)
        return table[mask]

    return CoalitionGame(players, utility)


def random_game(rng, n, rational=False):
    table = [0] * (1 << n)
    for m in range(1, 1 << n):
        v = rng.randint(-5, 9)
        table[m] = Fraction(v, rng.randint(1, 4)) if rational else v
    return table_game(n, table)


def test_glove_game():
    # players 1,2 hold left gloves, 3 a right glove
    def u(s):
        return min(len(s & {1, 2}), len(s & {3}))

    g = CoalitionGame((1, 2, 3), u)
    for engine in (kernel.shapley_exact_permutations, kernel.shapley_exact_subsets):
        v = engine(g)
        assert (v[1], v[2], v[3]) == (Fraction(1, 6), Fraction(1, 6), Fraction(2, 3))


def test_empty_and_single_player():
    assert kernel.shapley_exact_subsets(CoalitionGame((), lambda s: 0)).entries == {}
    g = CoalitionGame(("a",), lambda s: 7 if s else 0)
    assert kernel.shapley_exact_permutations(g)["a"] == 7
    assert kernel.shapley_exact_subsets(g)["a"] == 7


def test_caps():
    g = CoalitionGame(tuple(range(10)), lambda s: len(s))
    with pytest.raises(CapExceeded):
        kernel.shapley_exact_permutations(g)
    with pytest.raises(CapExceeded):
        kernel.shapley_exact_subsets(g, cap=5)
    with pytest.raises(PreconditionError):
        CoalitionGame((1, 1), lambda s: 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.booleans())
def test_engines_match_textbook_oracles(seed, n, rational):
    g = random_game(random.Random(seed), n, rational)
    perm = kernel.shapley_exact_permutations(g)
    sub = kernel.shapley_exact_subsets(g)
    oracle = shapley_by_permutations(g.players, g.utility)
    assert perm.entries == oracle
    assert sub.entries == oracle
    assert shapley_by_subsets(g.players, g.utility) == oracle


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8))
def test_efficiency(seed, n):
    g = random_game(random.Random(seed), n, rational=True)
    v = kernel.shapley_exact_subsets(g)
    grand = Fraction(g.utility(frozenset(g.players))) - Fraction(g.utility(frozenset()))
    assert v.total() == grand


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 7))
def test_symmetry_and_null_player(seed, n):
    rng = random.Random(seed)
    # utility depends only on how many of players 1..n-1 are present, so
    # those players are symmetric and player n is null
    weights = [0] + [rng.randint(-3, 5) for _ in range(n)]

    def u(s):
        return weights[len(s - {n})]

    v = kernel.shapley_exact_subsets(CoalitionGame(tuple(range(1, n + 1)), u))
    assert v[n] == 0
    assert len({v[p] for p in range(1, n)}) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_linearity(seed, n):
    rng = random.Random(seed)
    g1, g2 = random_game(rng, n), random_game(rng, n)
    a, b = rng.randint(-3, 3), Fraction(rng.randint(1, 5), 7)
    combined = CoalitionGame(g1.players, lambda s: a * g1.utility(s) + b * g2.utility(s))
    v, v1, v2 = (kernel.shapley_exact_subsets(x) for x in (combined, g1, g2))
    assert all(v[p] == a * v1[p] + b * v2[p] for p in g1.players)


def test_large_values_fall_back_to_exact_python():
    big = 10**30
    g = CoalitionGame((1, 2, 3), lambda s: big * len(s) + (big if s == {1, 2, 3} else 0))
    for engine in (kernel.shapley_exact_permutations, kernel.shapley_exact_subsets):
        v = engine(g)
        assert v[1] == big + Fraction(big, 3)


def test_sample_size_values():
    assert kernel.sample_size(0.1, 0.1, 1) == 150
    assert kernel.sample_size(0.1, 0.1, 2) == 600
    assert kernel.sample_size(1, 0.5, 1) == 1
    assert kernel.sample_size(0.05, 0.1, 1) == 600
    with pytest.raises(ValueError):
        kernel.sample_size(0, 0.1)
    with pytest.raises(ValueError):
        kernel.sample_size(0.1, 1)


def test_estimates_are_deterministic_per_seed():
    g = random_game(random.Random(3), 5).memoized()
    a = kernel.estimate_additive(g, 2, 0.2, 0.1, seed=7, value_range=20)
    b = kernel.estimate_additive(g, 2, 0.2, 0.1, seed=7, value_range=20)
    c = kernel.estimate_additive(g, 2, 0.2, 0.1, seed=8, value_range=20)
    assert a == b
    assert a.value != c.value
    assert a.samples == kernel.sample_size(0.2, 0.1, 20)


def test_estimate_all_independent_of_workers():
    g = random_game(random.Random(5), 5).memoized()
    one = kernel.estimate_all(g, g.players, 0.3, 0.2, seed=1, value_range=20)
    many = kernel.estimate_all(g, g.players, 0.3, 0.2, seed=1, value_range=20, workers=3)
    assert one == many


def test_multiplicative_snaps_small_values():
    def u(s):
        return 1 if 1 in s and 2 in s else 0

    g = CoalitionGame((1, 2, 3), u)
    est = kernel.estimate_multiplicative(g, 3, 0.2, 0.1, Fraction(1, 6), seed=0)
    assert est.value == 0.0
    assert est.extra["additive_eps"] == pytest.approx(kernel.multiplicative_tolerance(0.2, 1 / 6))
    with pytest.raises(PreconditionError):
        kernel.estimate_multiplicative(g, 1, 0.2, 0.1, 0)
