"""As-of-year views, index histories, yearly venue indices and rank lookups."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Sequence

from .graph import (
    VENUE_YEAR,
    CitationGraph,
    EntityKey,
    IndexParams,
    Paper,
    UnknownPaperError,
    _entities,
)
from .indices import INDEX_KINDS, IndexProfile, all_profiles, entity_profile, h_index


@dataclass(frozen=True)
class AsOfView:
    """The graph as it stood at the end of ``cutoff``.

    A paper is visible iff its year is known and <= cutoff; an edge counts
    iff both endpoints are visible. Provides the same read interface as
    :class:`CitationGraph`.
    """

    base: CitationGraph
    cutoff: int

    def is_visible(self, paper: Paper) -> bool:
        return paper.year is not None and paper.year <= self.cutoff

    @property
    def max_year(self) -> int | None:
        m = self.base.max_year
        return None if m is None else min(m, self.cutoff)

    def paper(self, pid: str) -> Paper:
        p = self.base.paper(pid)
        if not self.is_visible(p):
            raise UnknownPaperError(pid)
        return p

    def iter_papers(self) -> Iterator[Paper]:
        return (p for p in self.base.papers.values() if self.is_visible(p))

    def papers_of(self, entity: EntityKey) -> set[str]:
        papers = self.base.papers
        return {i for i in self.base.papers_of(entity) if self.is_visible(papers[i])}

    def citers(self, pid: str) -> list[Paper]:
        self.paper(pid)
        return [c for c in self.base.citers(pid) if self.is_visible(c)]

    def citation_count(self, pid: str, as_of: int | None = None) -> int:
        cut = self.cutoff if as_of is None else min(as_of, self.cutoff)
        return sum(1 for c in self.citers(pid) if c.year <= cut)

    def entities(self, kind: str) -> list[EntityKey]:
        return _entities(self, kind)

    def edge_count(self) -> int:
        return sum(len(self.citers(p.id)) for p in self.iter_papers())


def slice_as_of(graph, year: int) -> AsOfView:
    base = graph.base
    lo, hi = base.year_range
    if not lo <= year <= hi:
        raise ValueError(f"year {year} outside plausible range {base.year_range}")
    if isinstance(graph, AsOfView):
        year = min(year, graph.cutoff)
    return AsOfView(base, year)


@dataclass(frozen=True)
class HistorySeries:
    entity: EntityKey
    index_kind: str
    points: tuple[tuple[int, float | int | None], ...]


def history_curves(
    graph,
    entity: EntityKey,
    index_kinds: Sequence[str],
    year_from: int,
    year_to: int,
    params: IndexParams,
) -> list[HistorySeries]:
    """One series per index kind; each point recomputed on its own slice."""
    if year_from > year_to:
        raise ValueError(f"year_from {year_from} > year_to {year_to}")
    for k in index_kinds:
        if k not in INDEX_KINDS:
            raise ValueError(f"unknown index kind {k!r}")
    profiles = [
        entity_profile(slice_as_of(graph, y), entity, replace(params, now=y))
        for y in range(year_from, year_to + 1)
    ]
    return [
        HistorySeries(entity, k, tuple((p.eval_year, p.value(k)) for p in profiles))
        for k in index_kinds
    ]


def history_curve(graph, entity, index_kind, year_from, year_to, params) -> HistorySeries:
    return history_curves(graph, entity, [index_kind], year_from, year_to, params)[0]


def _yearly_counts(graph, venue: str, year: int, as_of: int | None) -> list[int]:
    ids = graph.papers_of(EntityKey.venue_year(venue, year))
    return [graph.citation_count(i, as_of) for i in sorted(ids)]


def yearly_h(graph, venue: str, year: int, as_of: int | None = None) -> int:
    """h over the venue's papers from ``year``; citations from the whole dataset
    unless ``as_of`` restricts them."""
    return h_index(_yearly_counts(graph, venue, year, as_of))


def normalized_yearly_h(graph, venue: str, year: int, as_of: int | None = None) -> float:
    counts = _yearly_counts(graph, venue, year, as_of)
    if not counts:
        return 0.0
    return h_index(counts) / len(counts)


def rank_position_at_year(
    graph,
    entity: EntityKey,
    index_kind: str,
    year: int,
    params: IndexParams,
    workers: int = 1,
) -> int:
    """1-based position of ``entity`` in the full ranking over the slice at ``year``."""
    from .ranking import rank_entities

    view = slice_as_of(graph, year)
    p = replace(params, now=year)
    profiles = all_profiles(view, entity.kind, p, workers=workers)
    if not any(pr.entity == entity for pr in profiles):
        profiles.append(IndexProfile.empty(entity, year))
    table = rank_entities(profiles, index_kind)
    for row in table.rows:
        if row.profile.entity == entity:
            return row.rank
    raise AssertionError("entity missing from its own ranking")


def yearly_profiles(
    graph, years: Sequence[int], params: IndexParams, venue: str | None = None,
    workers: int = 1,
) -> list[IndexProfile]:
    """venue_year profiles for the given publication years (optionally one venue)."""
    wanted = set(years)
    profiles = all_profiles(graph, VENUE_YEAR, params, workers=workers)
    return [
        p for p in profiles
        if p.entity.year in wanted and (venue is None or p.entity.name == venue)
    ]
