from .conflicts import ConflictGraph, conflict_graph, violates
from .evaluation import (
    QueryClass,
    atom_sets,
    classify_query,
    eval_boolean,
    exact_polynomial_applicable,
    homomorphisms,
    minimal_sets,
    witnesses,
)
from .model import CQ, FD, UCQ, Atom, Database, Fact, RelationSchema, Var
from .parsing import parse_database, parse_fds, parse_query

__all__ = [
    "Atom", "CQ", "ConflictGraph", "Database", "FD", "Fact", "QueryClass",
    "RelationSchema", "UCQ", "Var", "atom_sets", "classify_query", "conflict_graph",
    "eval_boolean", "exact_polynomial_applicable", "homomorphisms", "minimal_sets",
    "parse_database", "parse_fds", "parse_query", "violates", "witnesses",
]
