from ..kernel import Attribution
from .attribution import (
    ENGINES,
    QueryConfig,
    classification_report,
    default_gap,
    null_player,
    shapley_coefficient_sum,
    shapq_all,
    shapq_dispatch,
    shapq_exact_hierarchical,
    shapq_game,
)
from .lineage import (
    LineageCircuit,
    Node,
    dnf_value,
    factorize_read_once,
    lineage_dnf,
    size_stratified_counts,
    verify_read_once,
)

__all__ = [
    "Attribution", "ENGINES", "LineageCircuit", "Node", "QueryConfig",
    "classification_report", "default_gap", "dnf_value", "factorize_read_once",
    "lineage_dnf", "null_player", "shapley_coefficient_sum", "shapq_all",
    "shapq_dispatch", "shapq_exact_hierarchical", "shapq_game",
    "size_stratified_counts", "verify_read_once",
]
