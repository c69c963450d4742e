"""h-index, its real-score generalization, article scores and entity profiles.

Plain ``h`` counts citations. ``h_c`` decays each article by its own age and
``h_t`` decays each citation by the citing article's age; both then reuse the
h mechanism over real scores. The ``a`` family relates a total to ``h**2``.
"""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import EntityKey, IndexParams, Paper

INDEX_KINDS = ("h", "h_c", "h_t", "h_n", "a", "a_c", "a_t")


class ScoreError(ValueError):
    """An article score is not defined for the given inputs."""


def h_index(counts: Iterable[int]) -> int:
    """Largest ``h`` such that at least ``h`` of ``counts`` are >= ``h``."""
    ranked = sorted(counts, reverse=True)
    h = 0
    for i, c in enumerate(ranked, 1):
        if c >= i:
            h = i
        else:
            break
    return h


def generalized_h(scores: Iterable[float]) -> int:
    """h mechanism over non-negative real scores, with integer thresholds."""
    ranked = sorted(scores, reverse=True)
    h = 0
    for i, s in enumerate(ranked, 1):
        if s < 0:
            raise ValueError(f"negative score {s}")
        if s >= i:
            h = i
        else:
            break
    return h


def _dated_citers(citers: Iterable[Paper], now: int) -> Counter:
    return Counter(c.year for c in citers if c.year is not None and c.year <= now)


def contemporary_score(paper: Paper, citers: Sequence[Paper], params: IndexParams) -> float:
    """``gamma * (now - year + 1)**-delta * |C|``, counting citers dated <= now."""
    if paper.year is None:
        raise ScoreError(f"paper {paper.id!r} has no year")
    if paper.year > params.now:
        raise ScoreError(f"paper {paper.id!r} ({paper.year}) is newer than now={params.now}")
    n = sum(_dated_citers(citers, params.now).values())
    age = params.now - paper.year + 1
    return params.gamma * n / age**params.delta


def trend_score(paper: Paper, citers: Sequence[Paper], params: IndexParams) -> float:
    """``gamma * sum((now - year(x) + 1)**-delta)`` over citers dated <= now."""
    by_year = _dated_citers(citers, params.now)
    # per-year grouping keeps exact values exact (e.g. 3 citations of age 3)
    terms = [
        params.gamma * n / (params.now - y + 1) ** params.delta
        for y, n in sorted(by_year.items())
    ]
    return math.fsum(terms)


def a_index(total: float, h: int) -> float | None:
    """``total / h**2``; None when h is 0."""
    if total < 0:
        raise ValueError(f"negative total {total}")
    if h == 0:
        return None
    return total / (h * h)


@dataclass(frozen=True)
class PaperScores:
    count: int
    contemporary: float | None
    trend: float | None


def paper_scores(paper: Paper, citers: Sequence[Paper], params: IndexParams) -> PaperScores:
    # undated citers count for plain h only; citers after now are ignored
    count = sum(1 for c in citers if c.year is None or c.year <= params.now)
    if paper.year is None or paper.year > params.now:
        return PaperScores(count, None, None)
    return PaperScores(
        count,
        contemporary_score(paper, citers, params),
        trend_score(paper, citers, params),
    )


@dataclass(frozen=True)
class IndexProfile:
    entity: EntityKey
    n_p: int
    n_c_tot: int
    h: int
    a: float | None
    h_c: int
    a_c: float | None
    h_t: int
    a_t: float | None
    h_n: float
    eval_year: int

    def value(self, kind: str):
        if kind not in INDEX_KINDS:
            raise ValueError(f"unknown index kind {kind!r}")
        return getattr(self, kind)

    @classmethod
    def empty(cls, entity: EntityKey, eval_year: int) -> IndexProfile:
        return cls(entity, 0, 0, 0, None, 0, None, 0, None, 0.0, eval_year)


def profile_from_scores(
    entity: EntityKey, scores: Sequence[PaperScores], eval_year: int
) -> IndexProfile:
    counts = [s.count for s in scores]
    sc = [s.contemporary for s in scores if s.contemporary is not None]
    st = [s.trend for s in scores if s.trend is not None]
    n_p = len(scores)
    h = h_index(counts)
    h_c = generalized_h(sc)
    h_t = generalized_h(st)
    n_c_tot = sum(counts)
    return IndexProfile(
        entity=entity,
        n_p=n_p,
        n_c_tot=n_c_tot,
        h=h,
        a=a_index(n_c_tot, h),
        h_c=h_c,
        a_c=a_index(math.fsum(sc), h_c),
        h_t=h_t,
        a_t=a_index(math.fsum(st), h_t),
        h_n=h / n_p if n_p else 0.0,
        eval_year=eval_year,
    )


def entity_profile(graph, entity: EntityKey, params: IndexParams) -> IndexProfile:
    """All indices for one entity over a graph or an as-of view."""
    ids = sorted(graph.papers_of(entity))
    scores = [paper_scores(graph.paper(i), graph.citers(i), params) for i in ids]
    return profile_from_scores(entity, scores, params.now)


class ProfileCalculator:
    """Caches per-paper scores so many entities can share them.

    Scores are computed on first use per paper; results are identical to
    :func:`entity_profile` because both paths go through :func:`paper_scores`.
    """

    def __init__(self, graph, params: IndexParams):
        self.graph = graph
        self.params = params
        self._scores: dict[str, PaperScores] = {}

    def precompute(self) -> None:
        g = self.graph
        for p in g.iter_papers():
            if p.id not in self._scores:
                self._scores[p.id] = paper_scores(p, g.citers(p.id), self.params)

    def scores(self, pid: str) -> PaperScores:
        s = self._scores.get(pid)
        if s is None:
            s = paper_scores(self.graph.paper(pid), self.graph.citers(pid), self.params)
            self._scores[pid] = s
        return s

    def profile(self, entity: EntityKey) -> IndexProfile:
        ids = sorted(self.graph.papers_of(entity))
        return profile_from_scores(entity, [self.scores(i) for i in ids], self.params.now)


def all_profiles(
    graph, kind: str, params: IndexParams, workers: int = 1
) -> list[IndexProfile]:
    """Profiles for every entity of ``kind`` in ``graph``, in entity sort order."""
    calc = ProfileCalculator(graph, params)
    calc.precompute()
    entities = graph.entities(kind)
    if workers <= 1 or len(entities) < 2:
        return [calc.profile(e) for e in entities]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(calc.profile, entities, chunksize=256))
