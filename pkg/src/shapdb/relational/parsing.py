"""Readers for the three text formats: facts, datalog-style queries and FDs.

Fact file::

    # comment
    endo R(1, a)
    exo  S("two words")

Query file (one or more rules with the same Boolean head)::

    q() :- R(x, y), S(x).
    q() :- T(x, 'a')

Bare identifiers in query atoms are variables; constants are integers or
quoted strings. In fact files bare identifiers are string values.

FD file::

    R: A B -> C
    R: -> B
"""
from __future__ import annotations

import re
from typing import Iterator, Mapping

from ..errors import ParseError
from .model import (
    CQ,
    FD,
    UCQ,
    Atom,
    Database,
    Fact,
    RelationSchema,
    Var,
    default_attributes,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>[#%][^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<int>-?\d+(?![A-Za-z_]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<implies>:-)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)


def _tokens(text: str) -> Iterator[tuple[str, str, int]]:
    line = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line)
        kind = m.lastgroup
        val = m.group()
        pos = m.end()
        if kind == "nl":
            line += 1
            continue
        if kind in ("ws", "comment"):
            continue
        if kind == "punct":
            kind = val
        yield kind, val, line


def _unquote(tok: str) -> str:
    body = tok[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


class _Stream:
    def __init__(self, tokens):
        self.toks = list(tokens)
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None, self.last_line)

    @property
    def last_line(self):
        return self.toks[-1][2] if self.toks else 1

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind):
        k, v, line = self.next()
        if k != kind:
            found = "end of input" if k is None else repr(v)
            raise ParseError(f"expected {kind!r}, found {found}", line)
        return v, line

    def done(self):
        return self.i >= len(self.toks)


def _parse_fact_value(kind, val, line):
    if kind == "int":
        return int(val)
    if kind == "string":
        return _unquote(val)
    if kind == "ident":
        return val
    raise ParseError(f"expected a value, found {val!r}", line)


def parse_database(text: str) -> Database:
    """Read a fact file. Schema is inferred from the first use of each relation."""
    schema: dict[str, RelationSchema] = {}
    facts: list[Fact] = []
    seen: dict[tuple, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = _Stream(_tokens(raw + "\n"))
        # re-number tokens to the physical line
        s.toks = [(k, v, lineno) for k, v, _ in s.toks]
        if s.done():
            continue
        flag, _ = s.expect("ident")
        if flag not in ("endo", "exo"):
            raise ParseError(f"expected 'endo' or 'exo', found {flag!r}", lineno)
        rel, _ = s.expect("ident")
        s.expect("(")
        values = []
        if s.peek()[0] != ")":
            while True:
                values.append(_parse_fact_value(*s.next()))
                if s.peek()[0] == ",":
                    s.next()
                    continue
                break
        s.expect(")")
        if not s.done():
            raise ParseError(f"trailing input {s.peek()[1]!r}", lineno)
        values = tuple(values)
        if rel not in schema:
            schema[rel] = RelationSchema(rel, default_attributes(len(values)))
        elif schema[rel].arity != len(values):
            raise ParseError(
                f"relation {rel} used with arity {len(values)}, earlier with {schema[rel].arity}",
                lineno,
            )
        if (rel, values) in seen:
            raise ParseError(f"duplicate fact, first seen on line {seen[(rel, values)]}", lineno)
        seen[(rel, values)] = lineno
        facts.append(Fact(len(facts) + 1, rel, values, flag == "endo"))
    return Database(schema, tuple(facts))


def _parse_atom(s: _Stream) -> Atom:
    rel, _ = s.expect("ident")
    s.expect("(")
    terms = []
    if s.peek()[0] != ")":
        while True:
            kind, val, line = s.next()
            if kind == "ident":
                terms.append(Var(val))
            elif kind == "int":
                terms.append(int(val))
            elif kind == "string":
                terms.append(_unquote(val))
            else:
                raise ParseError(f"expected a term, found {val!r}", line)
            if s.peek()[0] == ",":
                s.next()
                continue
            break
    s.expect(")")
    return Atom(rel, tuple(terms))


def parse_query(text: str, schema: Mapping[str, RelationSchema] | None = None) -> UCQ:
    """Read one or more Boolean rules into a UCQ (disjuncts in file order)."""
    s = _Stream(_tokens(text))
    rules: list[CQ] = []
    head_name = None
    arities: dict[str, int] = {}
    while not s.done():
        name, line = s.expect("ident")
        s.expect("(")
        if s.peek()[0] != ")":
            raise ParseError("only Boolean queries are accepted (head must be empty)", line)
        s.expect(")")
        if head_name is None:
            head_name = name
        elif name != head_name:
            raise ParseError(f"all rules must share the head {head_name}(), found {name}()", line)
        s.expect("implies")
        atoms = []
        while True:
            atom_line = s.peek()[2]
            atom = _parse_atom(s)
            known = arities.get(atom.relation)
            if known is None and schema is not None and atom.relation in schema:
                known = schema[atom.relation].arity
            if known is not None and known != len(atom.terms):
                raise ParseError(
                    f"relation {atom.relation} used with arity {len(atom.terms)}, expected {known}",
                    atom_line,
                )
            arities[atom.relation] = len(atom.terms)
            atoms.append(atom)
            if s.peek()[0] == ",":
                s.next()
                continue
            break
        if s.peek()[0] == ".":
            s.next()
        rules.append(CQ(tuple(atoms)))
    if not rules:
        raise ParseError("query file contains no rules")
    return UCQ(tuple(rules))


_FD_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*:(.*?)->(.*)$")


def parse_fds(text: str, schema: Mapping[str, RelationSchema] | None = None) -> list[FD]:
    """Read ``R: A B -> C`` lines. Attributes may be separated by blanks or commas."""
    fds = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = re.sub(r"[#%].*$", "", raw).strip()
        if not line:
            continue
        m = _FD_LINE.match(line)
        if m is None:
            raise ParseError("expected 'R: A B -> C'", lineno)
        rel, lhs_s, rhs_s = m.groups()
        lhs = [a for a in re.split(r"[\s,]+", lhs_s.strip()) if a]
        rhs = [a for a in re.split(r"[\s,]+", rhs_s.strip()) if a]
        for a in lhs + rhs:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", a):
                raise ParseError(f"bad attribute name {a!r}", lineno)
        if not rhs:
            raise ParseError("FD has an empty right-hand side", lineno)
        if schema is not None and rel in schema:
            attrs = set(schema[rel].attributes)
            for a in lhs + rhs:
                if a not in attrs:
                    raise ParseError(f"relation {rel} has no attribute {a!r}", lineno)
        fds.append(FD.of(rel, lhs, rhs))
    return fds
