from ..kernel import Attribution
from .attribution import (
    ENGINES,
    MC_APPROX_REFUSAL,
    InconsistencyConfig,
    closed_form_value,
    drastic_gap,
    shapi_all,
    shapi_closed_form,
    shapi_dispatch,
    shapi_game,
)
from .measures import (
    Budget,
    MeasureKind,
    cardinality_repair_cost,
    count_maximal_consistent,
    count_maximal_independent_sets,
    graph_measure,
    inconsistency_measure,
    min_vertex_cover,
)
from .tractability import (
    ChainClassification,
    TractabilityReport,
    closure,
    has_lhs_chain,
    lhs_chain_classify,
    minimal_cover,
    simplify,
    table_column,
    tractability_report,
)

__all__ = [
    "Attribution", "Budget", "ChainClassification", "ENGINES", "InconsistencyConfig",
    "MC_APPROX_REFUSAL", "MeasureKind", "TractabilityReport", "cardinality_repair_cost",
    "closed_form_value", "closure", "count_maximal_consistent",
    "count_maximal_independent_sets", "drastic_gap", "graph_measure", "has_lhs_chain",
    "inconsistency_measure", "lhs_chain_classify", "min_vertex_cover", "minimal_cover",
    "shapi_all", "shapi_closed_form", "shapi_dispatch", "shapi_game", "simplify",
    "table_column", "tractability_report",
]
