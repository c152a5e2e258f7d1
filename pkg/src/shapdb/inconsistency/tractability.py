"""Lhs-chain detection and the complexity verdicts for inconsistency attribution.

The chain test runs on a minimal cover of each relation's FDs. A minimal cover
is equivalent to the input, so a chain found there is a genuine witness; the
converse can fail, which is why a negative answer is reported as
"no chain after normalization".

Without a chain, the column of the complexity table is picked by the
cardinality-repair simplification: an empty residue means cardinality repairs
are polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..relational import FD
from .measures import MeasureKind

LHS_CHAIN = "lhs chain"
PTIME_REPAIR = "no lhs chain, PTime cardinality repair"
OTHER = "no lhs chain, other"


def closure(attrs: Iterable[str], fds: Iterable[FD]) -> frozenset[str]:
    out = set(attrs)
    fds = list(fds)
    changed = True
    while changed:
        changed = False
        for fd in fds:
            if fd.lhs <= out and not fd.rhs <= out:
                out |= fd.rhs
                changed = True
    return frozenset(out)


def _fd_key(fd: FD):
    return (len(fd.lhs), sorted(fd.lhs), sorted(fd.rhs))


def minimal_cover(fds: Iterable[FD]) -> list[FD]:
    """Equivalent FD set per relation: singleton right sides, no extraneous
    lhs attributes, no redundant FDs; then FDs with equal lhs are merged."""
    by_rel: dict[str, list[FD]] = {}
    for fd in fds:
        by_rel.setdefault(fd.relation, []).append(fd)
    out: list[FD] = []
    for rel in sorted(by_rel):
        split = {FD(rel, fd.lhs, frozenset((a,))) for fd in by_rel[rel] for a in fd.rhs - fd.lhs}
        work = sorted(split, key=_fd_key)
        reduced = []
        for fd in work:
            lhs = set(fd.lhs)
            for a in sorted(fd.lhs):
                trial = lhs - {a}
                if fd.rhs <= closure(trial, work):
                    lhs = trial
            reduced.append(FD(rel, frozenset(lhs), fd.rhs))
        work = sorted(set(reduced), key=_fd_key)
        i = 0
        while i < len(work):
            rest = work[:i] + work[i + 1:]
            if work[i].rhs <= closure(work[i].lhs, rest):
                work = rest
            else:
                i += 1
        merged: dict[frozenset, set] = {}
        for fd in work:
            merged.setdefault(fd.lhs, set()).update(fd.rhs)
        out.extend(sorted((FD(rel, lhs, frozenset(rhs)) for lhs, rhs in merged.items()),
                          key=_fd_key))
    return out


def has_lhs_chain(fds: Iterable[FD]) -> bool:
    """Per relation, the left-hand sides are totally ordered by containment."""
    by_rel: dict[str, list[frozenset]] = {}
    for fd in fds:
        by_rel.setdefault(fd.relation, []).append(fd.lhs)
    for sides in by_rel.values():
        sides.sort(key=len)
        for small, big in zip(sides, sides[1:]):
            if not small <= big:
                return False
    return True


@dataclass(frozen=True)
class ChainClassification:
    chain: bool
    normalized: tuple[FD, ...]


def lhs_chain_classify(fds: Iterable[FD]) -> ChainClassification:
    normalized = tuple(minimal_cover(fds))
    return ChainClassification(has_lhs_chain(normalized), normalized)


def _strip(work: set, attrs: frozenset) -> set:
    out = set()
    for lhs, rhs in work:
        lhs = lhs - attrs
        rhs = rhs - attrs - lhs
        if rhs:
            out.add((lhs, rhs))
    return out


def _closure_pairs(attrs, work) -> frozenset:
    return closure(attrs, [FD("_", lhs, rhs) for lhs, rhs in work])


def _simplify_relation(fds: list[FD]) -> list[tuple[frozenset, frozenset]]:
    work = _strip({(fd.lhs, fd.rhs) for fd in fds}, frozenset())
    while work:
        common = frozenset.intersection(*(lhs for lhs, _ in work))
        if common:
            work = _strip(work, frozenset((min(common),)))
            continue
        consensus = frozenset().union(*(rhs for lhs, rhs in work if not lhs))
        if consensus:
            work = _strip(work, consensus)
            continue
        sides = sorted({lhs for lhs, _ in work}, key=lambda x: (len(x), sorted(x)))
        married = None
        for i, x1 in enumerate(sides):
            for x2 in sides[i + 1:]:
                if (_closure_pairs(x1, work) == _closure_pairs(x2, work)
                        and all(x1 <= lhs or x2 <= lhs for lhs, _ in work)):
                    married = x1 | x2
                    break
            if married:
                break
        if married is None:
            break
        work = _strip(work, married)
    return sorted(work, key=lambda p: (len(p[0]), sorted(p[0]), sorted(p[1])))


def simplify(fds: Iterable[FD]) -> list[FD]:
    """Residue of the cardinality-repair simplification (common lhs attribute,
    consensus FD, lhs marriage). Empty iff cardinality repairs are polynomial;
    otherwise computing one is APX-complete."""
    out = []
    for rel, rel_fds in sorted(_relations(fds).items()):
        out.extend(FD(rel, lhs, rhs) for lhs, rhs in _simplify_relation(rel_fds))
    return out


def _singletons(fd: FD):
    if len(fd.lhs) == 1 and len(fd.rhs) == 1:
        return next(iter(fd.lhs)), next(iter(fd.rhs))
    return None


def _is_disjoint_pair(rel_fds: list[FD]) -> bool:
    """{A->B, C->D} over four distinct attributes, up to renaming."""
    if len(rel_fds) != 2:
        return False
    p, q = _singletons(rel_fds[0]), _singletons(rel_fds[1])
    return bool(p and q and len(set(p) | set(q)) == 4)


def _relations(fds: Iterable[FD]) -> dict[str, list[FD]]:
    out: dict[str, list[FD]] = {}
    for fd in fds:
        out.setdefault(fd.relation, []).append(fd)
    return out


@dataclass(frozen=True)
class TractabilityReport:
    measure: MeasureKind
    lhs_chain: str  # "yes" | "no after normalization"
    column: str
    exact: str
    approximate: str
    basis: tuple[str, ...] = ()
    open_question: str | None = None
    normalized: tuple[FD, ...] = field(default_factory=tuple)
    table_cell: tuple[str, str] = ("", "")

    @property
    def verdict(self) -> str:
        return f"{self.exact}; {self.approximate}"

    def as_dict(self) -> dict:
        return {
            "measure": self.measure.value,
            "lhs_chain": self.lhs_chain,
            "column": self.column,
            "exact": self.exact,
            "approximate": self.approximate,
            "verdict": self.verdict,
            "basis": list(self.basis),
            "open_question": self.open_question,
            "normalized_fds": [str(fd) for fd in self.normalized],
            "table_cell": {"exact": self.table_cell[0], "approximate": self.table_cell[1]},
        }


_BASIS = {
    MeasureKind.drastic: (
        "drastic measure: polynomial for FD sets equivalent to an lhs chain (dynamic "
        "programming), FP^#P-complete otherwise",
        "drastic measure: nonzero values are at least 1/(|D|(|D|-1)), giving additive and "
        "multiplicative FPRAS for every FD set",
    ),
    MeasureKind.MI: (
        "MI measure: a fact's marginal equals its number of earlier conflict partners; "
        "polynomial for every FD set",
    ),
    MeasureKind.P: (
        "P measure: marginal counts f itself and earlier partners not already in conflict; "
        "polynomial for every FD set",
    ),
    MeasureKind.R: (
        "R measure: polynomial for FD sets equivalent to an lhs chain",
        "R measure: NP-hard without additive or multiplicative FPRAS whenever computing a "
        "cardinality repair is NP-hard (efficiency transfers hardness)",
        "R measure: both FPRAS when cardinality repairs are polynomial; nonzero values are at "
        "least 1/(|D|(|D|-1))",
    ),
    MeasureKind.MC: (
        "MC measure: polynomial for FD sets equivalent to an lhs chain, FP^#P-complete "
        "otherwise (counting subset repairs is #P-complete there)",
    ),
}

_OPEN_R = ("exact complexity of R attributions is open for FD sets without an lhs chain "
           "whose cardinality repairs are polynomial, e.g. {A->B, B->A}")
_OPEN_MC = ("whether MC attributions admit a multiplicative FPRAS is open for every FD set "
            "without an lhs chain")


# (exact ; approximate) per measure and column; "unknown" stands for an open cell
TABLE = {
    MeasureKind.drastic: {LHS_CHAIN: ("PTime", "PTime"),
                          PTIME_REPAIR: ("FP^#P-complete", "FPRAS"),
                          OTHER: ("FP^#P-complete", "FPRAS")},
    MeasureKind.MI: {c: ("PTime", "PTime") for c in (LHS_CHAIN, PTIME_REPAIR, OTHER)},
    MeasureKind.P: {c: ("PTime", "PTime") for c in (LHS_CHAIN, PTIME_REPAIR, OTHER)},
    MeasureKind.R: {LHS_CHAIN: ("PTime", "PTime"),
                    PTIME_REPAIR: ("unknown", "FPRAS"),
                    OTHER: ("NP-hard", "no FPRAS")},
    MeasureKind.MC: {LHS_CHAIN: ("PTime", "PTime"),
                     PTIME_REPAIR: ("FP^#P-complete", "FPRAS unknown"),
                     OTHER: ("FP^#P-complete", "FPRAS unknown")},
}


def table_column(fds: Iterable[FD]) -> str:
    fds = list(fds)
    if lhs_chain_classify(fds).chain:
        return LHS_CHAIN
    return PTIME_REPAIR if not simplify(fds) else OTHER


def tractability_report(fds: Iterable[FD], kind) -> TractabilityReport:
    kind = MeasureKind(kind)
    fds = list(fds)
    cls = lhs_chain_classify(fds)
    column = table_column(fds)
    cell = TABLE[kind][column]
    exact, approx = cell
    basis = _BASIS[kind]
    open_q = None
    if kind is MeasureKind.R and column == PTIME_REPAIR:
        open_q = _OPEN_R
    elif kind is MeasureKind.R and column == OTHER:
        basis = basis + ("the simplification procedure leaves "
                         + ", ".join(str(fd) for fd in simplify(fds))
                         + ", so cardinality repairs are APX-complete",)
    elif kind is MeasureKind.MC and column != LHS_CHAIN:
        rels = _relations(cls.normalized)
        if any(_is_disjoint_pair(rf) for rf in rels.values() if not has_lhs_chain(rf)):
            approx = "no FPRAS (unless NP = RP)"
            basis = basis + ("counting subset repairs for {A->B, C->D} admits no FPRAS unless "
                             "NP = RP, and efficiency carries this to attributions",)
        else:
            open_q = _OPEN_MC
    return TractabilityReport(
        measure=kind,
        lhs_chain="yes" if cls.chain else "no after normalization",
        column=column,
        exact=exact,
        approximate=approx,
        basis=basis,
        open_question=open_q,
        normalized=cls.normalized,
        table_cell=cell,
    )
