"""Facts, databases, queries and functional dependencies.

Everything here is immutable once built. A :class:`Database` keeps its facts
in a tuple ordered by id and lazily builds lookup indexes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Union

from ..errors import InputError

Value = Union[int, str]

_BARE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def format_value(v: Value) -> str:
    if isinstance(v, int) or _BARE.match(v):
        return str(v)
    return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'


def default_attributes(arity: int) -> tuple[str, ...]:
    """Positional attribute names A, B, C, ... (A1, A2, ... past 26)."""
    if arity <= 26:
        return tuple(chr(ord("A") + i) for i in range(arity))
    return tuple(f"A{i + 1}" for i in range(arity))


@dataclass(frozen=True)
class RelationSchema:
    name: str
    attributes: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.attributes)

    def position(self, attribute: str) -> int:
        try:
            return self.attributes.index(attribute)
        except ValueError:
            raise InputError(f"relation {self.name} has no attribute {attribute!r}") from None


@dataclass(frozen=True)
class Fact:
    id: int
    relation: str
    values: tuple[Value, ...]
    endogenous: bool = True

    @property
    def key(self) -> tuple[str, tuple[Value, ...]]:
        return (self.relation, self.values)

    def __str__(self) -> str:
        return f"{self.relation}({','.join(format_value(v) for v in self.values)})"


@dataclass(frozen=True)
class Database:
    schema: Mapping[str, RelationSchema]
    facts: tuple[Fact, ...]

    def __post_init__(self):
        seen_ids = set()
        seen_keys = set()
        for f in self.facts:
            rel = self.schema.get(f.relation)
            if rel is None:
                raise InputError(f"fact {f} uses relation {f.relation} missing from schema")
            if rel.arity != len(f.values):
                raise InputError(f"fact {f} has arity {len(f.values)}, schema says {rel.arity}")
            if f.id in seen_ids:
                raise InputError(f"duplicate fact id {f.id}")
            if f.key in seen_keys:
                raise InputError(f"duplicate fact {f}")
            seen_ids.add(f.id)
            seen_keys.add(f.key)

    @classmethod
    def build(cls, rows: Iterable, schema: Mapping[str, Iterable[str]] | None = None) -> "Database":
        """Build from ``(relation, values)`` or ``(relation, values, endogenous)`` rows.

        Ids are assigned 1, 2, ... in row order. Attribute names default to
        A, B, C, ... unless given in ``schema``.
        """
        rels: dict[str, RelationSchema] = {}
        if schema:
            for name, attrs in schema.items():
                rels[name] = RelationSchema(name, tuple(attrs))
        facts = []
        for i, row in enumerate(rows, start=1):
            relation, values, *rest = row
            endo = rest[0] if rest else True
            values = tuple(values)
            if relation not in rels:
                rels[relation] = RelationSchema(relation, default_attributes(len(values)))
            facts.append(Fact(i, relation, values, bool(endo)))
        return cls(rels, tuple(facts))

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self):
        return iter(self.facts)

    @cached_property
    def by_id(self) -> dict[int, Fact]:
        return {f.id: f for f in self.facts}

    @cached_property
    def endogenous(self) -> tuple[Fact, ...]:
        return tuple(f for f in self.facts if f.endogenous)

    @cached_property
    def exogenous(self) -> tuple[Fact, ...]:
        return tuple(f for f in self.facts if not f.endogenous)

    @cached_property
    def by_relation(self) -> dict[str, tuple[Fact, ...]]:
        out: dict[str, list[Fact]] = {}
        for f in self.facts:
            out.setdefault(f.relation, []).append(f)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def value_index(self) -> dict[tuple[str, int, Value], tuple[Fact, ...]]:
        """``(relation, position, value) -> facts`` lookup."""
        out: dict[tuple, list[Fact]] = {}
        for f in self.facts:
            for pos, v in enumerate(f.values):
                out.setdefault((f.relation, pos, v), []).append(f)
        return {k: tuple(v) for k, v in out.items()}

    def restrict(self, ids: Iterable[int]) -> "Database":
        """Sub-database with the given fact ids (same schema)."""
        keep = set(ids)
        return Database(self.schema, tuple(f for f in self.facts if f.id in keep))

    def fact(self, ident: int) -> Fact:
        try:
            return self.by_id[ident]
        except KeyError:
            raise InputError(f"no fact with id {ident}") from None


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, int, str]


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: tuple[Term, ...]

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(t.name for t in self.terms if isinstance(t, Var))

    def __str__(self) -> str:
        parts = [str(t) if isinstance(t, Var) else _quote_const(t) for t in self.terms]
        return f"{self.relation}({','.join(parts)})"


def _quote_const(v: Value) -> str:
    if isinstance(v, int):
        return str(v)
    return "'" + v.replace("'", "\\'") + "'"


@dataclass(frozen=True)
class CQ:
    """Boolean conjunctive query; every variable is existential."""

    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise InputError("a conjunctive query needs at least one atom")

    @property
    def variables(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for a in self.atoms:
            out |= a.variables
        return out

    @property
    def relations(self) -> frozenset[str]:
        return frozenset(a.relation for a in self.atoms)

    def __str__(self) -> str:
        return "q() :- " + ", ".join(str(a) for a in self.atoms)


@dataclass(frozen=True)
class UCQ:
    disjuncts: tuple[CQ, ...]

    def __post_init__(self):
        if not self.disjuncts:
            raise InputError("a UCQ needs at least one disjunct")

    @classmethod
    def of(cls, q: "CQ | UCQ") -> "UCQ":
        return q if isinstance(q, UCQ) else cls((q,))

    def __str__(self) -> str:
        return "\n".join(str(d) for d in self.disjuncts)


@dataclass(frozen=True)
class FD:
    relation: str
    lhs: frozenset[str]
    rhs: frozenset[str]

    def __str__(self) -> str:
        return f"{self.relation}: {' '.join(sorted(self.lhs))} -> {' '.join(sorted(self.rhs))}"

    @classmethod
    def of(cls, relation: str, lhs: Iterable[str], rhs: Iterable[str]) -> "FD":
        return cls(relation, frozenset(lhs), frozenset(rhs))
