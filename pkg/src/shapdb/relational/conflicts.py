from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable

from .model import FD, Database, Fact


@dataclass(frozen=True)
class ConflictGraph:
    """Facts as vertices; an edge for every pair jointly violating some FD."""

    vertices: tuple[int, ...]
    edges: frozenset[frozenset[int]]

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for e in self.edges:
            a, b = tuple(e)
            adj[a].add(b)
            adj[b].add(a)
        return {v: frozenset(n) for v, n in adj.items()}

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)

    def induced(self, keep: Iterable[int]) -> "ConflictGraph":
        keep = frozenset(keep)
        verts = tuple(v for v in self.vertices if v in keep)
        return ConflictGraph(verts, frozenset(e for e in self.edges if e <= keep))


def violates(f: Fact, g: Fact, fd: FD, db: Database) -> bool:
    """Direct check: same relation, agree on the lhs, differ somewhere on the rhs."""
    if f.relation != fd.relation or g.relation != fd.relation:
        return False
    rel = db.schema[fd.relation]
    if any(f.values[rel.position(a)] != g.values[rel.position(a)] for a in fd.lhs):
        return False
    return any(f.values[rel.position(a)] != g.values[rel.position(a)] for a in fd.rhs)


def conflict_graph(db: Database, fds: Iterable[FD]) -> ConflictGraph:
    edges: set[frozenset[int]] = set()
    for fd in fds:
        facts = db.by_relation.get(fd.relation, ())
        if not facts:
            continue
        rel = db.schema[fd.relation]
        lpos = [rel.position(a) for a in sorted(fd.lhs)]
        rpos = [rel.position(a) for a in sorted(fd.rhs)]
        groups: dict[tuple, dict[tuple, list[int]]] = {}
        for f in facts:
            lk = tuple(f.values[p] for p in lpos)
            rk = tuple(f.values[p] for p in rpos)
            groups.setdefault(lk, {}).setdefault(rk, []).append(f.id)
        for by_rhs in groups.values():
            if len(by_rhs) < 2:
                continue
            for (_, xs), (_, ys) in combinations(by_rhs.items(), 2):
                for x in xs:
                    for y in ys:
                        edges.add(frozenset((x, y)))
    return ConflictGraph(tuple(f.id for f in db.facts), frozenset(edges))
