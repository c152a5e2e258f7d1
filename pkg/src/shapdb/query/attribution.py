"""Contribution of endogenous facts to a Boolean UCQ answer."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .. import kernel
from ..errors import InputError
from ..kernel import Attribution, CoalitionGame
from ..relational import (
    CQ,
    UCQ,
    Database,
    classify_query,
    eval_boolean,
    exact_polynomial_applicable,
    witnesses,
)
from .lineage import factorize_read_once, size_stratified_counts

ENGINES = ("auto", "brute-perm", "brute-subset", "hierarchical", "sample")


def shapq_game(q: CQ | UCQ, db: Database) -> CoalitionGame:
    """Players are endogenous fact ids; utility(E) = q(E ∪ D_x) - q(D_x)."""
    exo = [f.id for f in db.exogenous]
    base = eval_boolean(q, db.restrict(exo))

    def utility(coalition: frozenset) -> int:
        return eval_boolean(q, db.restrict(list(coalition) + exo)) - base

    return CoalitionGame(tuple(f.id for f in db.endogenous), utility).memoized()


def _endogenous_id(db: Database, fact_id: int) -> int:
    f = db.fact(fact_id)
    if not f.endogenous:
        raise InputError(f"fact {fact_id} ({f}) is exogenous and has no Shapley value")
    return fact_id


def shapley_coefficient_sum(diff: list[int], n: int) -> Fraction:
    """Σ_k k!(n-k-1)!/n! · diff[k] for coalitions of the other n-1 players."""
    num = gmpy2.mpz(0)
    left = gmpy2.mpz(1)  # k!
    right = gmpy2.fac(n - 1)  # (n-k-1)!
    for k in range(n):
        d = diff[k] if k < len(diff) else 0
        if d:
            num += d * left * right
        if k + 1 < n:
            left *= k + 1
            right //= n - k - 1
    return Fraction(int(num), int(gmpy2.fac(n)))


def shapq_exact_hierarchical(q: CQ | UCQ, db: Database, fact_id: int, circuit=None) -> Fraction:
    """Exact value from size-stratified counts of the read-once lineage."""
    _endogenous_id(db, fact_id)
    if circuit is None:
        circuit = factorize_read_once(q, db)
    n = len(db.endogenous)
    scope = frozenset(f.id for f in db.endogenous) - {fact_id}
    with_f = size_stratified_counts(circuit.condition(fact_id, True), scope)
    without_f = size_stratified_counts(circuit.condition(fact_id, False), scope)
    diff = [a - b for a, b in zip(with_f, without_f)]
    return shapley_coefficient_sum(diff, n)


def null_player(q: CQ | UCQ, db: Database, fact_id: int) -> bool:
    """True iff the fact lies in no minimal witness (its value is then exactly 0)."""
    _endogenous_id(db, fact_id)
    return not any(fact_id in w for w in witnesses(q, db))


@dataclass
class QueryConfig:
    engine: str = "auto"
    approx: str = "additive"
    eps: float = 0.05
    delta: float = 0.1
    seed: int = 0
    gap: Fraction | float | None = None
    certify_zero: bool = True
    value_range: float | None = None
    perm_cap: int = kernel.PERMUTATION_CAP
    subset_cap: int = kernel.SUBSET_CAP
    workers: int = 1

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise InputError(f"unknown engine {self.engine!r}; choose from {', '.join(ENGINES)}")
        if self.approx not in ("additive", "multiplicative"):
            raise InputError("approx must be 'additive' or 'multiplicative'")
        if not self.eps > 0:
            raise InputError("eps must be positive")
        if not 0 < self.delta < 1:
            raise InputError("delta must lie in (0, 1)")
        if self.gap is not None and not self.gap > 0:
            raise InputError("gap must be positive")


def classification_report(q: CQ | UCQ) -> dict:
    ucq = UCQ.of(q)
    rows = []
    for cq in ucq.disjuncts:
        c = classify_query(cq)
        rows.append({"query": str(cq), "self_join_free": c.self_join_free,
                     "hierarchical": c.hierarchical})
    if len(ucq.disjuncts) == 1 and rows[0]["self_join_free"]:
        family = ("hierarchical self-join-free CQ: exact values in FP"
                  if rows[0]["hierarchical"]
                  else "non-hierarchical self-join-free CQ: FP^#P-hard family")
    elif exact_polynomial_applicable(ucq):
        family = "relation-disjoint union of hierarchical self-join-free CQs: exact values in FP"
    else:
        family = "outside the self-join-free CQ dichotomy: exact complexity not classified here"
    return {
        "disjuncts": rows,
        "exact_polynomial": exact_polynomial_applicable(ucq),
        "family": family,
        "approximation": "additive and multiplicative FPRAS (polynomial evaluation, gap property of UCQs)",
    }


def default_gap(n: int) -> Fraction:
    return Fraction(1, n * (n - 1)) if n >= 2 else Fraction(1)


def _pick_engine(q, db, cfg: QueryConfig) -> str:
    n = len(db.endogenous)
    if cfg.engine != "auto":
        return cfg.engine
    if exact_polynomial_applicable(q):
        return "hierarchical"
    if n <= cfg.subset_cap:
        return "brute-subset"
    return "sample"


def shapq_all(q: CQ | UCQ, db: Database, cfg: QueryConfig | None = None,
              facts=None) -> list[Attribution]:
    """Values for the selected endogenous facts (all by default)."""
    cfg = cfg or QueryConfig()
    q = UCQ.of(q)
    ids = [f.id for f in db.endogenous] if facts is None else [_endogenous_id(db, i) for i in facts]
    exo = db.restrict(f.id for f in db.exogenous)
    if eval_boolean(q, exo):
        return [Attribution(i, Fraction(0), "trivial", True,
                            {"reason": "query already holds on exogenous facts"}) for i in ids]
    engine = _pick_engine(q, db, cfg)
    if engine == "hierarchical":
        circuit = factorize_read_once(q, db)
        return [Attribution(i, shapq_exact_hierarchical(q, db, i, circuit), engine, True)
                for i in ids]
    if engine in ("brute-perm", "brute-subset"):
        game = shapq_game(q, db)
        if engine == "brute-perm":
            vec = kernel.shapley_exact_permutations(game, cfg.perm_cap)
        else:
            vec = kernel.shapley_exact_subsets(game, cfg.subset_cap)
        return [Attribution(i, vec[i], engine, True) for i in ids]
    game = shapq_game(q, db)
    return kernel.map_players(lambda i: _sample(q, db, game, i, cfg), ids, cfg.workers)


def _sample(q, db, game, fact_id, cfg: QueryConfig) -> Attribution:
    n = len(game.players)
    value_range = cfg.value_range or 1.0  # monotone 0/1 game: marginals in {0, 1}
    if cfg.approx == "additive":
        est = kernel.estimate_additive(game, fact_id, cfg.eps, cfg.delta, cfg.seed, value_range)
        return Attribution(fact_id, est.value, "sample", False, {
            "mode": "additive", "eps": cfg.eps, "delta": cfg.delta,
            "samples": est.samples, "seed": cfg.seed, "value_range": value_range})
    if cfg.gap is None and not cfg.certify_zero:
        raise InputError("multiplicative estimation needs a gap or zero-certification")
    gap = Fraction(cfg.gap) if cfg.gap is not None else default_gap(n)
    guarantee = {"mode": "multiplicative", "eps": cfg.eps, "delta": cfg.delta,
                 "seed": cfg.seed, "gap": str(gap), "gap_is_default": cfg.gap is None,
                 "value_range": value_range}
    if cfg.gap is None:
        guarantee["gap_note"] = "default 1/(n(n-1)) is heuristic; the UCQ gap constant is not certified"
    if cfg.certify_zero and null_player(q, db, fact_id):
        guarantee.update(samples=0, zero_certified=True)
        return Attribution(fact_id, 0.0, "sample", False, guarantee)
    est = kernel.estimate_multiplicative(game, fact_id, cfg.eps, cfg.delta, gap, cfg.seed,
                                         value_range)
    guarantee.update(samples=est.samples, additive_eps=est.extra["additive_eps"],
                     raw=est.raw, zero_certified=False)
    return Attribution(fact_id, est.value, "sample", False, guarantee)


def shapq_dispatch(q: CQ | UCQ, db: Database, fact_id: int,
                   cfg: QueryConfig | None = None) -> tuple[Attribution, dict]:
    """Value of one fact plus a report naming engine and classification."""
    cfg = cfg or QueryConfig()
    (result,) = shapq_all(q, db, cfg, [fact_id])
    report = {"engine": result.engine, "classification": classification_report(q),
              "guarantee": result.guarantee}
    return result, report


__all__ = [
    "Attribution", "ENGINES", "QueryConfig", "classification_report", "default_gap",
    "null_player", "shapley_coefficient_sum", "shapq_all", "shapq_dispatch",
    "shapq_exact_hierarchical", "shapq_game",
]
