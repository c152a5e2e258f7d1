"""Boolean query evaluation, witness enumeration and query classification."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .model import CQ, UCQ, Atom, Database, Fact, Var


def _candidates(atom: Atom, binding: dict, db: Database) -> tuple[Fact, ...]:
    best = None
    for pos, t in enumerate(atom.terms):
        v = binding.get(t.name, _UNBOUND) if isinstance(t, Var) else t
        if v is _UNBOUND:
            continue
        hits = db.value_index.get((atom.relation, pos, v), ())
        if best is None or len(hits) < len(best):
            best = hits
            if not best:
                break
    if best is None:
        best = db.by_relation.get(atom.relation, ())
    return best


_UNBOUND = object()


def _unify(atom: Atom, fact: Fact, binding: dict) -> dict | None:
    if len(fact.values) != len(atom.terms):
        return None
    out = binding
    for t, v in zip(atom.terms, fact.values):
        if isinstance(t, Var):
            cur = out.get(t.name, _UNBOUND)
            if cur is _UNBOUND:
                if out is binding:
                    out = dict(binding)
                out[t.name] = v
            elif cur != v:
                return None
        elif t != v:
            return None
    return out


def homomorphisms(q: CQ, db: Database) -> Iterator[tuple[dict, tuple[Fact, ...]]]:
    """Yield ``(assignment, image facts)`` for every homomorphism of ``q`` into ``db``."""
    atoms = list(q.atoms)

    def rec(remaining, binding, image):
        if not remaining:
            yield binding, tuple(image)
            return
        # most constrained atom first
        idx = min(
            range(len(remaining)),
            key=lambda i: len(_candidates(remaining[i], binding, db)),
        )
        atom = remaining[idx]
        rest = remaining[:idx] + remaining[idx + 1:]
        for fact in _candidates(atom, binding, db):
            b2 = _unify(atom, fact, binding)
            if b2 is not None:
                image.append(fact)
                yield from rec(rest, b2, image)
                image.pop()

    yield from rec(atoms, {}, [])


def eval_boolean(q: CQ | UCQ, db: Database) -> int:
    """1 if some disjunct maps homomorphically into ``db``, else 0."""
    for cq in UCQ.of(q).disjuncts:
        for _ in homomorphisms(cq, db):
            return 1
    return 0


def minimal_sets(sets: Iterable[frozenset]) -> list[frozenset]:
    """The subset-minimal members of ``sets``, deduplicated, in a canonical order."""
    uniq = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
    kept: list[frozenset] = []
    for s in uniq:
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


def witnesses(q: CQ | UCQ, db: Database) -> list[frozenset[int]]:
    """Minimal sets W of endogenous fact ids with q(W ∪ D_x) = 1.

    Returns ``[]`` when q(D) = 0 and ``[frozenset()]`` when q(D_x) = 1.
    """
    supports = set()
    for cq in UCQ.of(q).disjuncts:
        for _, image in homomorphisms(cq, db):
            s = frozenset(f.id for f in image if f.endogenous)
            if not s:
                return [frozenset()]
            supports.add(s)
    return minimal_sets(supports)


@dataclass(frozen=True)
class QueryClass:
    self_join_free: bool
    hierarchical: bool


def atom_sets(q: CQ) -> dict[str, frozenset[int]]:
    """Variable name -> indexes of the atoms using it."""
    out: dict[str, set[int]] = {}
    for i, a in enumerate(q.atoms):
        for v in a.variables:
            out.setdefault(v, set()).add(i)
    return {v: frozenset(s) for v, s in out.items()}


def is_hierarchical(q: CQ) -> bool:
    sets = list(atom_sets(q).values())
    for i, a in enumerate(sets):
        for b in sets[i + 1:]:
            if not (a <= b or b <= a or not (a & b)):
                return False
    return True


def is_self_join_free(q: CQ) -> bool:
    rels = [a.relation for a in q.atoms]
    return len(rels) == len(set(rels))


def classify_query(q: CQ) -> QueryClass:
    return QueryClass(self_join_free=is_self_join_free(q), hierarchical=is_hierarchical(q))


def exact_polynomial_applicable(q: CQ | UCQ) -> bool:
    """Every disjunct hierarchical and self-join-free, disjuncts relation-disjoint."""
    seen: set[str] = set()
    for cq in UCQ.of(q).disjuncts:
        c = classify_query(cq)
        if not (c.self_join_free and c.hierarchical):
            return False
        if seen & cq.relations:
            return False
        seen |= cq.relations
    return True
