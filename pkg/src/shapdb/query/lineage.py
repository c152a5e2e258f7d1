"""Lineage of Boolean queries over endogenous facts.

Two representations are kept side by side: the monotone DNF of minimal
witnesses (works for any UCQ) and a read-once circuit built directly from the
variable hierarchy of self-join-free hierarchical queries. The latter
supports counting satisfying assignments by number of true variables in
polynomial time.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from ..errors import PreconditionError
from ..relational import (
    CQ,
    UCQ,
    Atom,
    Database,
    Var,
    exact_polynomial_applicable,
    witnesses,
)
from ..relational.evaluation import _candidates, _unify
from .polynomial import binomial_row, poly_mul, poly_product


def lineage_dnf(q: CQ | UCQ, db: Database) -> list[frozenset[int]]:
    """Minimal witnesses as a monotone DNF; ``[]`` is false, ``[frozenset()]`` is true."""
    return witnesses(q, db)


def dnf_value(dnf: list[frozenset[int]], true_ids) -> bool:
    true_ids = frozenset(true_ids)
    return any(term <= true_ids for term in dnf)


@dataclass(frozen=True)
class Node:
    kind: str  # "var" | "const" | "and" | "or"
    fact: int | None = None
    value: bool | None = None
    children: tuple["Node", ...] = ()

    @cached_property
    def variables(self) -> frozenset[int]:
        if self.kind == "var":
            return frozenset((self.fact,))
        out: set[int] = set()
        for c in self.children:
            out.update(c.variables)
        return frozenset(out)

    def evaluate(self, true_ids: frozenset) -> bool:
        if self.kind == "var":
            return self.fact in true_ids
        if self.kind == "const":
            return bool(self.value)
        if self.kind == "and":
            return all(c.evaluate(true_ids) for c in self.children)
        return any(c.evaluate(true_ids) for c in self.children)

    def __str__(self) -> str:
        if self.kind == "var":
            return f"x{self.fact}"
        if self.kind == "const":
            return "1" if self.value else "0"
        op = " & " if self.kind == "and" else " | "
        return "(" + op.join(str(c) for c in self.children) + ")"


TRUE = Node("const", value=True)
FALSE = Node("const", value=False)


def var(fact_id: int) -> Node:
    return Node("var", fact=fact_id)


def conj(children: Iterable[Node]) -> Node:
    kept = []
    for c in children:
        if c.kind == "const":
            if not c.value:
                return FALSE
            continue
        kept.extend(c.children if c.kind == "and" else (c,))
    if not kept:
        return TRUE
    return kept[0] if len(kept) == 1 else Node("and", children=tuple(kept))


def disj(children: Iterable[Node]) -> Node:
    kept = []
    for c in children:
        if c.kind == "const":
            if c.value:
                return TRUE
            continue
        kept.extend(c.children if c.kind == "or" else (c,))
    if not kept:
        return FALSE
    return kept[0] if len(kept) == 1 else Node("or", children=tuple(kept))


@dataclass(frozen=True)
class LineageCircuit:
    root: Node
    read_once: bool

    @property
    def variables(self) -> frozenset[int]:
        return self.root.variables

    def evaluate(self, true_ids) -> bool:
        return self.root.evaluate(frozenset(true_ids))

    def condition(self, fact_id: int, value: bool) -> "LineageCircuit":
        return LineageCircuit(_condition(self.root, fact_id, value), self.read_once)


def _condition(node: Node, fact_id: int, value: bool) -> Node:
    if fact_id not in node.variables:
        return node
    if node.kind == "var":
        return TRUE if value else FALSE
    kids = [_condition(c, fact_id, value) for c in node.children]
    return conj(kids) if node.kind == "and" else disj(kids)


def verify_read_once(node: Node) -> bool:
    """Children of every gate have disjoint variables (so each variable occurs once)."""
    stack = [node]
    while stack:
        n = stack.pop()
        if n.kind in ("and", "or"):
            if sum(len(c.variables) for c in n.children) != len(n.variables):
                return False
            stack.extend(n.children)
    return True


def _value_key(v):
    return (isinstance(v, str), v)


def _matches(atom: Atom, binding: dict, db: Database):
    for fact in _candidates(atom, binding, db):
        b2 = _unify(atom, fact, binding)
        if b2 is not None:
            yield fact, b2


def _free(atom: Atom, binding: dict) -> frozenset[str]:
    return frozenset(t.name for t in atom.terms if isinstance(t, Var) and t.name not in binding)


def _components(atoms: list[Atom], binding: dict) -> list[list[Atom]]:
    parent = list(range(len(atoms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[str, int] = {}
    for i, a in enumerate(atoms):
        for v in sorted(_free(a, binding)):
            if v in owner:
                parent[find(i)] = find(owner[v])
            else:
                owner[v] = i
    groups: dict[int, list[Atom]] = {}
    for i, a in enumerate(atoms):
        groups.setdefault(find(i), []).append(a)
    return list(groups.values())


def _factor(atoms: list[Atom], binding: dict, db: Database) -> Node:
    if not atoms:
        return TRUE
    comps = _components(atoms, binding)
    if len(comps) > 1:
        out = []
        for comp in comps:
            node = _factor(comp, binding, db)
            if node is FALSE:
                return FALSE
            out.append(node)
        return conj(out)
    if len(atoms) == 1:
        (atom,) = atoms
        return disj(var(f.id) if f.endogenous else TRUE for f, _ in _matches(atom, binding, db))
    shared = frozenset.intersection(*(_free(a, binding) for a in atoms))
    if not shared:
        raise PreconditionError("query is not hierarchical: no variable occurs in every atom")
    root = min(shared)
    # values outside the smallest atom's matches give empty branches
    pivot = min(atoms, key=lambda a: len(_candidates(a, binding, db)))
    domain = {b[root] for _, b in _matches(pivot, binding, db)}
    branches = []
    for v in sorted(domain, key=_value_key):
        b2 = dict(binding)
        b2[root] = v
        branches.append(_factor(atoms, b2, db))
    return disj(branches)


def factorize_read_once(q: CQ | UCQ, db: Database) -> LineageCircuit:
    """Read-once lineage circuit of a hierarchical self-join-free query.

    A UCQ is accepted when its disjuncts are pairwise relation-disjoint.
    Exogenous facts become constant 1.
    """
    ucq = UCQ.of(q)
    if not exact_polynomial_applicable(ucq):
        raise PreconditionError(
            "read-once factorization needs self-join-free hierarchical disjuncts "
            "over pairwise disjoint relations"
        )
    root = disj(_factor(list(cq.atoms), {}, db) for cq in ucq.disjuncts)
    if not verify_read_once(root):
        raise PreconditionError("internal error: factorized lineage is not read-once")
    return LineageCircuit(root, True)


def _counts(node: Node) -> list[int]:
    """Model counts by number of true variables, over ``node.variables``."""
    if node.kind == "var":
        return [0, 1]
    if node.kind == "const":
        return [1] if node.value else [0]
    child = [_counts(c) for c in node.children]
    if node.kind == "and":
        return poly_product(child)
    non_models = []
    for c, vec in zip(node.children, child):
        row = binomial_row(len(c.variables))
        non_models.append([r - m for r, m in zip(row, vec)])
    miss = poly_product(non_models)
    row = binomial_row(len(node.variables))
    return [r - m for r, m in zip(row, miss)]


def size_stratified_counts(c: LineageCircuit, scope: Iterable[int]) -> list[int]:
    """``counts[k]`` = assignments of ``scope`` with exactly k true variables that satisfy ``c``."""
    if not c.read_once:
        raise PreconditionError("size-stratified counting needs a read-once circuit")
    scope = frozenset(scope)
    if not c.variables <= scope:
        raise PreconditionError("scope must contain every circuit variable")
    vec = _counts(c.root)
    return poly_mul(vec, binomial_row(len(scope) - len(c.variables)))
