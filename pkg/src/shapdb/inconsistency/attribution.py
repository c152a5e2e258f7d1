"""Contribution of facts to inconsistency (every fact is a player)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .. import kernel
from ..errors import InputError
from ..kernel import Attribution, CoalitionGame
from ..relational import FD, ConflictGraph, Database, conflict_graph
from .measures import Budget, MeasureKind, graph_measure

ENGINES = ("auto", "brute-perm", "brute-subset", "closed-form", "sample")

MC_APPROX_REFUSAL = (
    "multiplicative approximation of MC attributions is refused: its existence is an open "
    "question for every FD set without an lhs chain, and for {A->B, C->D} counting subset "
    "repairs admits no FPRAS unless NP = RP"
)


def shapi_game(graph: ConflictGraph, kind, budget: int | None = None) -> CoalitionGame:
    """Players are all facts; utility(E) is the measure of the sub-database E."""
    kind = MeasureKind(kind)

    def utility(coalition: frozenset) -> int:
        return graph_measure(graph.induced(coalition), kind, Budget(budget, f"{kind.value} utility"))

    return CoalitionGame(graph.vertices, utility).memoized()


def drastic_gap(size: int) -> Fraction:
    """Lower bound on nonzero drastic and R attributions over ``size`` facts."""
    return Fraction(1, size * (size - 1)) if size >= 2 else Fraction(1)


def closed_form_value(graph: ConflictGraph, kind, fact_id: int) -> Fraction:
    kind = MeasureKind(kind)
    if kind not in (MeasureKind.MI, MeasureKind.P):
        raise InputError(f"no closed form for measure {kind.value}; use MI or P")
    adj = graph.adjacency
    d = len(adj[fact_id])
    if kind is MeasureKind.MI:
        # each conflict partner precedes f in half the orderings
        return Fraction(d, 2)
    value = Fraction(d, d + 1)
    for g in adj[fact_id]:
        dg = len(adj[g])
        # g precedes f, and f precedes g's other d_g - 1 partners
        value += Fraction(1, dg * (dg + 1))
    return value


def shapi_closed_form(db: Database, fds: Iterable[FD], kind, fact_id: int) -> Fraction:
    db.fact(fact_id)
    return closed_form_value(conflict_graph(db, fds), kind, fact_id)


@dataclass
class InconsistencyConfig:
    engine: str = "auto"
    approx: str = "additive"
    eps: float = 0.05
    delta: float = 0.1
    seed: int = 0
    budget: int | None = None
    perm_cap: int = kernel.PERMUTATION_CAP
    subset_cap: int = 16
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


def _pick_engine(kind: MeasureKind, n: int, cfg: InconsistencyConfig) -> str:
    if cfg.engine != "auto":
        return cfg.engine
    if kind in (MeasureKind.MI, MeasureKind.P):
        return "closed-form"
    if n <= cfg.subset_cap:
        return "brute-subset"
    return "sample"


def _marginal_range(graph: ConflictGraph, kind: MeasureKind, fact_id: int, budget) -> int:
    d = len(graph.adjacency[fact_id])
    if kind in (MeasureKind.drastic, MeasureKind.R):
        return 1
    if kind is MeasureKind.MI:
        return max(d, 1)
    if kind is MeasureKind.P:
        return d + 1
    # MC is monotone, so a single marginal never exceeds the full count
    return max(graph_measure(graph, kind, Budget(budget, "MC range")), 1)


def _gap(kind: MeasureKind, size: int) -> Fraction:
    if kind in (MeasureKind.drastic, MeasureKind.R):
        return drastic_gap(size)
    # closed forms: a fact with a conflict gets at least 1/2
    return Fraction(1, 2)


def shapi_all(db: Database, fds: Iterable[FD], kind, cfg: InconsistencyConfig | None = None,
              facts=None) -> list[Attribution]:
    cfg = cfg or InconsistencyConfig()
    kind = MeasureKind(kind)
    fds = list(fds)
    ids = [f.id for f in db.facts] if facts is None else [db.fact(i).id for i in facts]
    graph = conflict_graph(db, fds)
    engine = _pick_engine(kind, len(db), cfg)
    if engine == "closed-form":
        return [Attribution(i, closed_form_value(graph, kind, i), engine, True) for i in ids]
    game = shapi_game(graph, kind, cfg.budget)
    if engine == "brute-perm":
        vec = kernel.shapley_exact_permutations(game, cfg.perm_cap)
        return [Attribution(i, vec[i], engine, True) for i in ids]
    if engine == "brute-subset":
        vec = kernel.shapley_exact_subsets(game, cfg.subset_cap)
        return [Attribution(i, vec[i], engine, True) for i in ids]
    if cfg.approx == "multiplicative" and kind is MeasureKind.MC:
        raise InputError(MC_APPROX_REFUSAL)
    return kernel.map_players(lambda i: _sample(graph, game, kind, i, cfg), ids, cfg.workers)


def _sample(graph, game, kind: MeasureKind, fact_id: int, cfg: InconsistencyConfig) -> Attribution:
    value_range = _marginal_range(graph, kind, fact_id, cfg.budget)
    guarantee = {"mode": cfg.approx, "eps": cfg.eps, "delta": cfg.delta, "seed": cfg.seed,
                 "value_range": value_range}
    if cfg.approx == "additive":
        est = kernel.estimate_additive(game, fact_id, cfg.eps, cfg.delta, cfg.seed, value_range)
        guarantee["samples"] = est.samples
        return Attribution(fact_id, est.value, "sample", False, guarantee)
    gap = _gap(kind, len(graph.vertices))
    guarantee["gap"] = str(gap)
    if not graph.adjacency[fact_id]:
        # a fact in no conflict never changes drastic, MI, P or R (MC never gets here)
        guarantee.update(samples=0, zero_certified=True)
        return Attribution(fact_id, 0.0, "sample", False, guarantee)
    est = kernel.estimate_multiplicative(game, fact_id, cfg.eps, cfg.delta, gap, cfg.seed,
                                         value_range)
    guarantee.update(samples=est.samples, additive_eps=est.extra["additive_eps"], raw=est.raw,
                     zero_certified=False)
    return Attribution(fact_id, est.value, "sample", False, guarantee)


def shapi_dispatch(db: Database, fds: Iterable[FD], kind, fact_id: int,
                   cfg: InconsistencyConfig | None = None) -> tuple[Attribution, dict]:
    from .tractability import tractability_report

    fds = list(fds)
    (result,) = shapi_all(db, fds, kind, cfg, [fact_id])
    report = {"engine": result.engine, "guarantee": result.guarantee,
              "tractability": tractability_report(fds, kind).as_dict()}
    return result, report
