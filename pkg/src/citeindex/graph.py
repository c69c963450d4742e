"""In-memory citation graph: papers, resolved citation edges and entity lookups.

A :class:`CitationGraph` is built once (see :func:`citeindex.ingest.build_graph`)
and never mutated afterwards, so it can be shared freely between threads.
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

DEFAULT_YEAR_RANGE = (1900, 2100)

AUTHOR = "author"
VENUE = "venue"
VENUE_YEAR = "venue_year"
ENTITY_KINDS = (AUTHOR, VENUE, VENUE_YEAR)

VENUE_KINDS = ("conference", "journal", "unknown")

_WS = re.compile(r"\s+")


def normalize_name(name: str) -> str:
    """NFC-normalize, trim and collapse internal whitespace. No case folding."""
    return _WS.sub(" ", unicodedata.normalize("NFC", name)).strip()


@dataclass(frozen=True)
class Paper:
    id: str
    year: int | None = None
    authors: tuple[str, ...] = ()
    venue: str | None = None
    venue_kind: str = "unknown"
    cites: tuple[str, ...] = ()


@dataclass(frozen=True, order=True)
class EntityKey:
    kind: str
    name: str
    year: int | None = None

    def __post_init__(self):
        if self.kind not in ENTITY_KINDS:
            raise ValueError(f"unknown entity kind {self.kind!r}")
        if (self.year is not None) != (self.kind == VENUE_YEAR):
            raise ValueError("year must be given iff kind is venue_year")

    @classmethod
    def author(cls, name: str) -> EntityKey:
        return cls(AUTHOR, normalize_name(name))

    @classmethod
    def venue(cls, name: str) -> EntityKey:
        return cls(VENUE, name)

    @classmethod
    def venue_year(cls, name: str, year: int) -> EntityKey:
        return cls(VENUE_YEAR, name, year)

    def sort_key(self) -> tuple:
        # bytewise on the normalized name, then year for venue_year keys
        return (self.name.encode("utf-8"), -1 if self.year is None else self.year)

    def label(self) -> str:
        return self.name if self.year is None else f"{self.name}/{self.year}"


@dataclass(frozen=True)
class IndexParams:
    now: int
    gamma: float = 4.0
    delta: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.delta >= 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")


class UnknownPaperError(KeyError):
    pass


@dataclass(frozen=True, eq=True)
class CitationGraph:
    """Resolved citation graph.

    ``in_edges[p]`` lists the ids of papers citing ``p``, sorted and without
    duplicates. ``papers[c].cites`` holds only resolved targets, so the two
    views of the edge set agree exactly.
    """

    papers: Mapping[str, Paper]
    in_edges: Mapping[str, tuple[str, ...]]
    by_author: Mapping[str, tuple[str, ...]]
    by_venue: Mapping[str, tuple[str, ...]]
    dangling_citation_count: int = 0
    max_year: int | None = None
    year_range: tuple[int, int] = field(default=DEFAULT_YEAR_RANGE, compare=False)

    @classmethod
    def from_papers(
        cls,
        papers: Iterable[Paper],
        dangling_citation_count: int = 0,
        year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
    ) -> CitationGraph:
        """Index already-resolved papers. Every cite target must be present."""
        by_id: dict[str, Paper] = {}
        for p in papers:
            by_id[p.id] = p
        in_edges: dict[str, list[str]] = {pid: [] for pid in by_id}
        by_author: dict[str, list[str]] = {}
        by_venue: dict[str, list[str]] = {}
        for pid in sorted(by_id):
            p = by_id[pid]
            for target in p.cites:
                if target not in in_edges:
                    raise ValueError(f"paper {pid!r} cites unknown paper {target!r}")
                in_edges[target].append(pid)
            for a in dict.fromkeys(p.authors):
                by_author.setdefault(a, []).append(pid)
            if p.venue is not None:
                by_venue.setdefault(p.venue, []).append(pid)
        years = [p.year for p in by_id.values() if p.year is not None]
        return cls(
            papers=by_id,
            in_edges={k: tuple(v) for k, v in in_edges.items()},
            by_author={k: tuple(v) for k, v in by_author.items()},
            by_venue={k: tuple(v) for k, v in by_venue.items()},
            dangling_citation_count=dangling_citation_count,
            max_year=max(years) if years else None,
            year_range=year_range,
        )

    # -- read interface shared with AsOfView -------------------------------

    @property
    def base(self) -> CitationGraph:
        return self

    @property
    def cutoff(self) -> int | None:
        return None

    def is_visible(self, paper: Paper) -> bool:
        return True

    def paper(self, pid: str) -> Paper:
        try:
            return self.papers[pid]
        except KeyError:
            raise UnknownPaperError(pid) from None

    def iter_papers(self) -> Iterator[Paper]:
        return iter(self.papers.values())

    def papers_of(self, entity: EntityKey) -> set[str]:
        if entity.kind == AUTHOR:
            return set(self.by_author.get(entity.name, ()))
        ids = self.by_venue.get(entity.name, ())
        if entity.kind == VENUE:
            return set(ids)
        return {pid for pid in ids if self.papers[pid].year == entity.year}

    def citers(self, pid: str) -> list[Paper]:
        self.paper(pid)
        return [self.papers[c] for c in self.in_edges[pid]]

    def citation_count(self, pid: str, as_of: int | None = None) -> int:
        citers = self.citers(pid)
        if as_of is None:
            return len(citers)
        return sum(1 for c in citers if c.year is not None and c.year <= as_of)

    def entities(self, kind: str) -> list[EntityKey]:
        """All entities of ``kind`` with at least one paper, in sort order."""
        return _entities(self, kind)

    def edge_count(self) -> int:
        return sum(len(v) for v in self.in_edges.values())


def _entities(view, kind: str) -> list[EntityKey]:
    base = view.base
    if kind == AUTHOR:
        keys = [
            EntityKey(AUTHOR, a)
            for a, ids in base.by_author.items()
            if any(view.is_visible(base.papers[i]) for i in ids)
        ]
    elif kind == VENUE:
        keys = [
            EntityKey(VENUE, v)
            for v, ids in base.by_venue.items()
            if any(view.is_visible(base.papers[i]) for i in ids)
        ]
    elif kind == VENUE_YEAR:
        found = set()
        for v, ids in base.by_venue.items():
            for i in ids:
                p = base.papers[i]
                if p.year is not None and view.is_visible(p):
                    found.add((v, p.year))
        keys = [EntityKey(VENUE_YEAR, v, y) for v, y in found]
    else:
        raise ValueError(f"unknown entity kind {kind!r}")
    return sorted(keys, key=EntityKey.sort_key)


def papers_of(graph, entity: EntityKey) -> set[str]:
    """Paper ids aggregated under ``entity``; unknown entities give an empty set."""
    return graph.papers_of(entity)


def citation_count(graph, paper: str, as_of: int | None = None) -> int:
    """Number of papers citing ``paper``; with ``as_of``, only citers dated <= as_of."""
    return graph.citation_count(paper, as_of)
