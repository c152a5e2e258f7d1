"""Game-agnostic Shapley machinery.

Exact engines return :class:`fractions.Fraction` values. Both build the full
utility table once (subsets by increasing size, then lexicographic order of
player positions) and then apply their own formula: an average over all
orderings, or the size-weighted sum over coalitions.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Hashable, Sequence

import numpy as np

from .errors import CapExceeded, PreconditionError

PERMUTATION_CAP = 9
SUBSET_CAP = 20

Utility = Callable[[frozenset], "int | Fraction"]


@dataclass(frozen=True)
class CoalitionGame:
    players: tuple[Hashable, ...]
    utility: Utility

    def __post_init__(self):
        if len(set(self.players)) != len(self.players):
            raise PreconditionError("duplicate player ids")

    def memoized(self) -> "CoalitionGame":
        cache: dict[frozenset, object] = {}
        inner = self.utility

        def utility(coalition: frozenset):
            coalition = frozenset(coalition)
            try:
                return cache[coalition]
            except KeyError:
                v = cache[coalition] = inner(coalition)
                return v

        return CoalitionGame(self.players, utility)


@dataclass
class ShapleyVector:
    entries: dict
    engine: str
    eps: float | None = None
    delta: float | None = None
    samples: int | None = None
    seed: int | None = None

    def __getitem__(self, player):
        return self.entries[player]

    def total(self):
        return sum(self.entries.values(), Fraction(0))


@dataclass
class Attribution:
    """One fact's value as reported by an attribution front end."""

    fact: int
    value: Fraction | float
    engine: str
    exact: bool
    guarantee: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Estimate:
    value: float
    eps: float
    delta: float
    samples: int
    seed: int
    mode: str = "additive"
    raw: float | None = None
    extra: dict = field(default_factory=dict)


def _utility_table(g: CoalitionGame):
    """Utilities of every coalition, scaled to a common integer denominator.

    Returns ``(sizes, masks, values, denom)`` where ``values[i]`` is the
    utility of the coalition with bitmask ``masks[i]`` times ``denom``.
    Coalitions are visited by increasing size, then lexicographically.
    """
    n = len(g.players)
    masks, raw, sizes = [], [], []
    for k in range(n + 1):
        for combo in combinations(range(n), k):
            m = 0
            for i in combo:
                m |= 1 << i
            masks.append(m)
            sizes.append(k)
            raw.append(Fraction(g.utility(frozenset(g.players[i] for i in combo))))
    denom = 1
    for v in raw:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    values = [v.numerator * (denom // v.denominator) for v in raw]
    return sizes, masks, values, denom


def _fits_int64(values, factor) -> bool:
    peak = max((abs(v) for v in values), default=0)
    return peak * factor < 2**62


def _check_cap(g, cap, name):
    if len(g.players) > cap:
        raise CapExceeded(f"{name} engine is capped at {cap} players, game has {len(g.players)}")


def shapley_exact_permutations(g: CoalitionGame, cap: int = PERMUTATION_CAP) -> ShapleyVector:
    """Average marginal contribution over all |L|! orderings."""
    _check_cap(g, cap, "permutation")
    n = len(g.players)
    if n == 0:
        return ShapleyVector({}, "brute-perm")
    _, masks, values, denom = _utility_table(g)
    fact_n = math.factorial(n)
    totals = [0] * n
    if _fits_int64(values, 2 * fact_n):
        table = np.zeros(1 << n, dtype=np.int64)
        table[np.array(masks, dtype=np.int64)] = np.array(values, dtype=np.int64)
        perms = np.array(list(permutations(range(n))), dtype=np.int64)
        bits = np.left_shift(np.int64(1), perms)
        after = np.cumsum(bits, axis=1)
        marginal = table[after] - table[after - bits]
        for a in range(n):
            totals[a] = int(marginal[perms == a].sum())
    else:
        table = dict(zip(masks, values))
        for perm in permutations(range(n)):
            before = 0
            for a in perm:
                after = before | (1 << a)
                totals[a] += table[after] - table[before]
                before = after
    entries = {p: Fraction(totals[i], fact_n * denom) for i, p in enumerate(g.players)}
    return ShapleyVector(entries, "brute-perm")


def shapley_exact_subsets(g: CoalitionGame, cap: int = SUBSET_CAP) -> ShapleyVector:
    """Size-weighted coalition sum: weight k!(n-k-1)!/n! for coalitions of size k."""
    _check_cap(g, cap, "subset")
    n = len(g.players)
    if n == 0:
        return ShapleyVector({}, "brute-subset")
    sizes, masks, values, denom = _utility_table(g)
    # inside[k][a]: sum of utilities over size-k coalitions containing a
    inside = [[0] * n for _ in range(n + 1)]
    total = [0] * (n + 1)
    start = 0
    use_np = _fits_int64(values, 1 << n)
    shifts = np.arange(n, dtype=np.int64)
    for k in range(n + 1):
        cnt = math.comb(n, k)
        block_vals = values[start:start + cnt]
        block_masks = masks[start:start + cnt]
        start += cnt
        total[k] = sum(block_vals)
        if use_np:
            mv = np.array(block_masks, dtype=np.int64)
            member = (mv[:, None] >> shifts) & 1
            sums = np.array(block_vals, dtype=np.int64) @ member
            inside[k] = [int(x) for x in sums]
        else:
            row = inside[k]
            for m, v in zip(block_masks, block_vals):
                if v:
                    for a in range(n):
                        if m >> a & 1:
                            row[a] += v
    fact = [math.factorial(i) for i in range(n + 1)]
    entries = {}
    for a, p in enumerate(g.players):
        acc = 0
        for k in range(1, n + 1):
            acc += fact[k - 1] * fact[n - k] * inside[k][a]
        for k in range(0, n):
            acc -= fact[k] * fact[n - k - 1] * (total[k] - inside[k][a])
        entries[p] = Fraction(acc, fact[n] * denom)
    return ShapleyVector(entries, "brute-subset")


def sample_size(eps: float, delta: float, value_range: float = 1.0) -> int:
    """Hoeffding sample count for a two-sided ±eps bound with confidence 1-delta."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not value_range > 0:
        raise ValueError("value range must be positive")
    return max(1, math.ceil(value_range**2 / (2 * eps**2) * math.log(2 / delta)))


def _stream(seed: int, g: CoalitionGame, player) -> np.random.Generator:
    ident = player if isinstance(player, int) and player >= 0 else g.players.index(player)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, ident])))


def estimate_additive(
    g: CoalitionGame,
    player,
    eps: float,
    delta: float,
    seed: int = 0,
    value_range: float = 1.0,
) -> Estimate:
    """Mean marginal contribution of ``player`` over sampled orderings.

    With ``value_range`` bounding the spread of single marginals, the result
    is within ``eps`` of the Shapley value with probability at least ``1-delta``.
    """
    m = sample_size(eps, delta, value_range)
    n = len(g.players)
    idx = g.players.index(player)
    rng = _stream(seed, g, player)
    total = 0
    for _ in range(m):
        order = rng.permutation(n)
        pos = int(np.flatnonzero(order == idx)[0])
        before = frozenset(g.players[i] for i in order[:pos])
        total += g.utility(before | {player}) - g.utility(before)
    value = float(Fraction(total) / m)
    return Estimate(value, eps, delta, m, seed)


def multiplicative_tolerance(eps: float, gap: float) -> float:
    return min(gap * eps / (1 + eps), gap / 2)


def estimate_multiplicative(
    g: CoalitionGame,
    player,
    eps: float,
    delta: float,
    gap,
    seed: int = 0,
    value_range: float = 1.0,
) -> Estimate:
    """Relative-error estimate for games whose nonzero values are at least ``gap``.

    Runs the additive estimator at tolerance ``gap*eps/(1+eps)`` (at most
    ``gap/2``) and snaps results below ``gap/2`` to zero.
    """
    gap = float(gap)
    if not gap > 0:
        raise PreconditionError("gap must be positive")
    tol = multiplicative_tolerance(eps, gap)
    raw = estimate_additive(g, player, tol, delta, seed, value_range)
    value = 0.0 if raw.value < gap / 2 else raw.value
    return Estimate(value, eps, delta, raw.samples, seed, "multiplicative", raw.value,
                    {"gap": gap, "additive_eps": tol})


def estimate_all(
    g: CoalitionGame,
    players: Sequence,
    eps: float,
    delta: float,
    seed: int = 0,
    value_range: float = 1.0,
    gap=None,
    workers: int = 1,
) -> dict:
    """Per-player estimates; each player draws from its own stream, so the
    result does not depend on ``workers``."""
    def one(p):
        if gap is None:
            return estimate_additive(g, p, eps, delta, seed, value_range)
        return estimate_multiplicative(g, p, eps, delta, gap, seed, value_range)

    return dict(zip(players, map_players(one, players, workers)))


def map_players(fn, players: Sequence, workers: int = 1) -> list:
    """``[fn(p) for p in players]``, optionally on a thread pool; order is kept."""
    players = list(players)
    if workers <= 1 or len(players) <= 1:
        return [fn(p) for p in players]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, players))
