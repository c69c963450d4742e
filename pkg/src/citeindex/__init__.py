"""h-index family indices over citation graphs."""
from .graph import CitationGraph, EntityKey, IndexParams, Paper, citation_count, papers_of
from .indices import (
    IndexProfile,
    a_index,
    all_profiles,
    contemporary_score,
    entity_profile,
    generalized_h,
    h_index,
    trend_score,
)
from .ingest import (
    IngestReport,
    RawRecord,
    build_graph,
    is_self_citation,
    load_graph,
    parse_dblp_xml,
    parse_jsonl,
    write_jsonl,
)
from .ranking import RankTable, emit_curve, emit_table, format_value, rank_entities
from .synthgen import GenConfig, generate
from .temporal import (
    AsOfView,
    HistorySeries,
    history_curve,
    history_curves,
    normalized_yearly_h,
    rank_position_at_year,
    slice_as_of,
    yearly_h,
)

__version__ = "0.1.0"
