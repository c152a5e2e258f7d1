"""Inconsistency measures over FD conflict graphs.

For FDs every minimal inconsistent subset is a conflicting pair, so all five
measures are graph quantities: drastic = any edge, MI = edge count,
P = non-isolated vertices, R = minimum vertex cover, MC = number of maximal
independent sets (zero for the empty database).
"""
from __future__ import annotations

import os
from enum import Enum
from typing import Iterable

from ..errors import BudgetExceeded
from ..relational import FD, ConflictGraph, Database, conflict_graph

DEFAULT_BUDGET = 2_000_000


class MeasureKind(str, Enum):
    drastic = "drastic"
    MI = "MI"
    P = "P"
    R = "R"
    MC = "MC"

    @classmethod
    def parse(cls, text: str) -> "MeasureKind":
        key = text.strip().lower()
        if key.startswith("i_"):
            key = key[2:]
        aliases = {"d": cls.drastic, "drastic": cls.drastic, "mi": cls.MI, "p": cls.P,
                   "r": cls.R, "mc": cls.MC}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown measure {text!r}; choose from drastic, MI, P, R, MC") from None


def budget_from_env() -> int:
    raw = os.environ.get("SHAPDB_BUDGET")
    if not raw:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"SHAPDB_BUDGET must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError("SHAPDB_BUDGET must be positive")
    return value


class Budget:
    """Counts search nodes; raises once the allowance is spent."""

    def __init__(self, limit: int | None = None, what: str = "search"):
        self.limit = budget_from_env() if limit is None else limit
        self.used = 0
        self.what = what

    def tick(self):
        self.used += 1
        if self.used > self.limit:
            raise BudgetExceeded(f"{self.what} exceeded its budget of {self.limit} nodes")


Adjacency = dict[int, set[int]]


def _adjacency(graph: ConflictGraph) -> Adjacency:
    return {v: set(n) for v, n in graph.adjacency.items()}


def _components(adj: Adjacency) -> list[Adjacency]:
    seen: set[int] = set()
    out = []
    for start in sorted(adj):
        if start in seen or not adj[start]:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        out.append({v: set(adj[v]) for v in comp})
    return out


def _remove(adj: Adjacency, gone: Iterable[int]) -> Adjacency:
    gone = set(gone)
    return {v: ns - gone for v, ns in adj.items() if v not in gone}


def _reduce_cover(adj: Adjacency) -> tuple[Adjacency, int]:
    """Degree-0, degree-1 and dominance reductions; returns (graph, forced picks)."""
    forced = 0
    changed = True
    while changed:
        changed = False
        adj = {v: ns for v, ns in adj.items() if ns}
        for v in sorted(adj):
            if v in adj and len(adj[v]) == 1:
                (u,) = adj[v]
                adj = _remove(adj, (u,))
                forced += 1
                changed = True
                break
        if changed:
            continue
        for v in sorted(adj):
            closed_v = adj[v] | {v}
            for u in adj[v]:
                # N[u] ⊆ N[v]: some optimal cover contains v
                if adj[u] | {u} <= closed_v:
                    adj = _remove(adj, (v,))
                    forced += 1
                    changed = True
                    break
            if changed:
                break
    return {v: ns for v, ns in adj.items() if ns}, forced


def _matching_bound(adj: Adjacency) -> int:
    matched: set[int] = set()
    size = 0
    for v in sorted(adj):
        if v in matched:
            continue
        for u in sorted(adj[v]):
            if u not in matched:
                matched |= {u, v}
                size += 1
                break
    return size


def _greedy_cover(adj: Adjacency) -> int:
    adj = {v: set(ns) for v, ns in adj.items()}
    size = 0
    while any(adj.values()):
        v = max(adj, key=lambda x: (len(adj[x]), -x))
        adj = _remove(adj, (v,))
        size += 1
    return size


def _cover_component(adj: Adjacency, budget: Budget) -> int:
    best = _greedy_cover(adj)

    def rec(g: Adjacency, size: int):
        nonlocal best
        budget.tick()
        g, forced = _reduce_cover(g)
        size += forced
        if not g:
            best = min(best, size)
            return
        if size + _matching_bound(g) >= best:
            return
        v = max(g, key=lambda x: (len(g[x]), -x))
        rec(_remove(g, (v,)), size + 1)
        rec(_remove(g, g[v]), size + len(g[v]))

    rec(adj, 0)
    return best


def min_vertex_cover(graph: ConflictGraph, budget: Budget | None = None) -> int:
    budget = budget or Budget(what="vertex cover")
    return sum(_cover_component(c, budget) for c in _components(_adjacency(graph)))


def _mis_component(adj: Adjacency, budget: Budget) -> int:
    closed = {v: ns | {v} for v, ns in adj.items()}

    def rec(cand: frozenset, excluded: frozenset) -> int:
        budget.tick()
        if not cand:
            return 0 if excluded else 1
        # every maximal extension contains some vertex of N[pivot] ∩ cand
        pivot = min(cand | excluded, key=lambda u: (len(closed[u] & cand), u))
        total = 0
        for v in sorted(closed[pivot] & cand):
            total += rec(cand - closed[v], excluded - closed[v])
            cand = cand - {v}
            excluded = excluded | {v}
        return total

    return rec(frozenset(adj), frozenset())


def count_maximal_independent_sets(graph: ConflictGraph, budget: Budget | None = None) -> int:
    budget = budget or Budget(what="repair enumeration")
    count = 1
    for comp in _components(_adjacency(graph)):
        count *= _mis_component(comp, budget)
    return count


def graph_measure(graph: ConflictGraph, kind: MeasureKind, budget: Budget | None = None) -> int:
    kind = MeasureKind(kind)
    if kind is MeasureKind.drastic:
        return 1 if graph.edges else 0
    if kind is MeasureKind.MI:
        return len(graph.edges)
    if kind is MeasureKind.P:
        return sum(1 for v in graph.vertices if graph.adjacency[v])
    if kind is MeasureKind.R:
        return min_vertex_cover(graph, budget)
    if not graph.vertices:
        return 0
    return count_maximal_independent_sets(graph, budget)


def inconsistency_measure(db: Database, fds: Iterable[FD], kind, budget: Budget | None = None) -> int:
    return graph_measure(conflict_graph(db, fds), MeasureKind(kind), budget)


def cardinality_repair_cost(db: Database, fds: Iterable[FD], budget: Budget | None = None) -> int:
    """Fewest deletions that make ``db`` satisfy ``fds`` (minimum vertex cover)."""
    return min_vertex_cover(conflict_graph(db, fds), budget)


def count_maximal_consistent(db: Database, fds: Iterable[FD], budget: Budget | None = None) -> int:
    """Number of subset repairs; 0 for the empty database by convention."""
    return graph_measure(conflict_graph(db, fds), MeasureKind.MC, budget)
