"""Seeded synthetic citation networks for tests and benchmarks.

The algorithm is fixed so that the same config yields the same corpus in any
language:

* RNG: SplitMix64. ``below(n) = (next() * n) >> 64``; ``uniform() =
  (next() >> 11) * 2**-53``; ``randint(lo, hi) = lo + below(hi - lo + 1)``.
* Paper ``i`` (0-based) is dated ``start + (i * n_years) // n_papers`` and
  keyed ``p%07d``. Per paper, draws happen in this order: trendsetter flag
  (``uniform() < trendsetter_fraction``, honoured only for papers dated before
  ``start + n_years // 2``), author count, distinct authors (redraw on
  repeats), venue, citation count, citation targets.
* Papers cite only strictly earlier years. Papers of the first year cite
  nothing. Non-trendsetters form the regular pool with integer weight
  ``round(1024 * (cites + 1) ** attachment_exponent)``; trendsetters form a
  second pool with weight ``1024 // (cites + 1)`` (spreading citations over
  all of them) that only papers dated from
  ``start + (3 * n_years) // 4`` on may cite. Such late papers send each
  citation to the trendsetter pool when ``uniform() < 0.5`` (or when the
  regular pool is exhausted).
* A target is drawn as the item whose weight interval contains
  ``below(pool_total)``. Repeats within one paper are redrawn, except when the
  pool holds at most four times the paper's citation count, in which case
  chosen items are zero-weighted until the paper is complete.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graph import CitationGraph
from .ingest import RawRecord, build_graph

_MASK = (1 << 64) - 1
_TREND_WEIGHT = 1024


class GenConfigError(ValueError):
    pass


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        return (self.next() * n) >> 64

    def uniform(self) -> float:
        return (self.next() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)


class _Pool:
    """Fenwick tree of integer weights over paper indices."""

    def __init__(self, size: int):
        self.n = size
        self.tree = [0] * (size + 1)
        self.weight = [0] * size
        self.total = 0
        self.count = 0
        self.top = 1 << max(size.bit_length() - 1, 0)

    def set(self, i: int, w: int) -> None:
        delta = w - self.weight[i]
        if not delta:
            return
        self.weight[i] = w
        self.total += delta
        j = i + 1
        tree, n = self.tree, self.n
        while j <= n:
            tree[j] += delta
            j += j & -j

    def find(self, r: int) -> int:
        """Index whose cumulative interval contains ``r`` (0 <= r < total)."""
        pos, step, tree = 0, self.top, self.tree
        while step:
            nxt = pos + step
            if nxt <= self.n and tree[nxt] <= r:
                pos = nxt
                r -= tree[nxt]
            step >>= 1
        return pos


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    n_papers: int = 1000
    year_span: tuple[int, int] = (1980, 2000)
    n_authors: int = 200
    n_venues: int = 10
    authors_per_paper: tuple[int, int] = (1, 3)
    attachment_exponent: float = 1.0
    cites_per_paper: tuple[int, int] = (0, 5)
    trendsetter_fraction: float = 0.0

    def validate(self) -> None:
        start, end = self.year_span
        amin, amax = self.authors_per_paper
        cmin, cmax = self.cites_per_paper
        if start > end:
            raise GenConfigError(f"year_span start {start} > end {end}")
        if self.n_papers < 0:
            raise GenConfigError("n_papers must be >= 0")
        if self.n_authors < 1 or self.n_venues < 1:
            raise GenConfigError("n_authors and n_venues must be positive")
        if not 0 <= amin <= amax <= self.n_authors:
            raise GenConfigError(f"authors_per_paper {self.authors_per_paper} invalid "
                                 f"for {self.n_authors} authors")
        if not 0 <= cmin <= cmax:
            raise GenConfigError(f"cites_per_paper {self.cites_per_paper} invalid")
        if self.attachment_exponent < 0:
            raise GenConfigError("attachment_exponent must be >= 0")
        if not 0 <= self.trendsetter_fraction <= 1:
            raise GenConfigError("trendsetter_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class SyntheticCorpus:
    records: tuple[RawRecord, ...]
    trendsetters: frozenset[str]


def _weight(cites: int, exponent: float) -> int:
    return max(1, round(1024 * (cites + 1) ** exponent))


def _draw(rng: SplitMix64, pool: _Pool, chosen: set[int], k: int, zeroed: list) -> int:
    if pool.count <= 4 * k:
        i = pool.find(rng.below(pool.total))
        zeroed.append((pool, i, pool.weight[i]))
        pool.set(i, 0)
        return i
    while True:
        i = pool.find(rng.below(pool.total))
        if i not in chosen:
            return i


def generate_corpus(config: GenConfig) -> SyntheticCorpus:
    config.validate()
    rng = SplitMix64(config.seed)
    n = config.n_papers
    start, end = config.year_span
    n_years = end - start + 1
    half = start + n_years // 2
    late = start + (3 * n_years) // 4
    cmin, cmax = config.cites_per_paper
    alpha = config.attachment_exponent

    years = [start + (i * n_years) // n for i in range(n)] if n else []
    regular, trend = _Pool(n), _Pool(n)
    cites_received = [0] * n
    is_trend = [False] * n
    records: list[RawRecord] = []
    pending = 0  # first index not yet inserted into a pool

    for i in range(n):
        year = years[i]
        while pending < i and years[pending] < year:
            if is_trend[pending]:
                trend.set(pending, _TREND_WEIGHT)
                trend.count += 1
            else:
                regular.set(pending, _weight(0, alpha))
                regular.count += 1
            pending += 1

        flagged = rng.uniform() < config.trendsetter_fraction
        is_trend[i] = flagged and year < half
        authors: list[int] = []
        for _ in range(rng.randint(*config.authors_per_paper)):
            a = rng.below(config.n_authors)
            while a in authors:
                a = rng.below(config.n_authors)
            authors.append(a)
        venue = rng.below(config.n_venues)
        want = rng.randint(cmin, cmax)

        targets: list[int] = []
        if year > start:
            is_late = year >= late
            available = regular.count + (trend.count if is_late else 0)
            if available < cmin:
                raise GenConfigError(
                    f"paper {i} ({year}) needs {cmin} citations but only "
                    f"{available} earlier papers are citable")
            k = min(want, available)
            chosen: set[int] = set()
            zeroed: list = []
            used_regular = used_trend = 0
            for _ in range(k):
                use_trend = False
                if is_late and used_trend < trend.count:
                    use_trend = used_regular >= regular.count or rng.uniform() < 0.5
                if use_trend:
                    t = _draw(rng, trend, chosen, k, zeroed)
                    used_trend += 1
                else:
                    t = _draw(rng, regular, chosen, k, zeroed)
                    used_regular += 1
                chosen.add(t)
                targets.append(t)
            for pool, j, w in reversed(zeroed):
                pool.set(j, w)
            for t in targets:
                cites_received[t] += 1
                if is_trend[t]:
                    trend.set(t, max(1, _TREND_WEIGHT // (cites_received[t] + 1)))
                else:
                    regular.set(t, _weight(cites_received[t], alpha))

        kind = "inproceedings" if venue % 2 == 0 else "article"
        records.append(RawRecord(
            key=f"p{i:07d}",
            kind=kind,
            year=year,
            authors=[f"Author {a:05d}" for a in authors],
            venue=f"v{venue:03d}",
            cites=[f"p{t:07d}" for t in targets],
            venue_kind="conference" if kind == "inproceedings" else "journal",
        ))

    flagged_keys = frozenset(f"p{i:07d}" for i in range(n) if is_trend[i])
    return SyntheticCorpus(tuple(records), flagged_keys)


def generate(config: GenConfig) -> CitationGraph:
    graph, _ = build_graph(generate_corpus(config).records)
    return graph
