"""Record parsing (DBLP XML subset, JSONL) and graph construction."""
from __future__ import annotations

import gzip
import html.entities
import json
import logging
import re
import xml.parsers.expat
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .graph import DEFAULT_YEAR_RANGE, CitationGraph, Paper, normalize_name

log = logging.getLogger(__name__)

RECORD_KINDS = ("article", "inproceedings")
_DEFAULT_VENUE_KIND = {"article": "journal", "inproceedings": "conference"}
# DBLP keys look like conf/vldb/Smith95 or journals/tods/Gray81
_SERIES_KEY = re.compile(r"^(?:conf|journals)/([^/]+)/")
UNKNOWN_CITE = "..."
CHUNK_SIZE = 1 << 16

# Stand-in for dblp.dtd: declares the HTML character entities DBLP uses, so
# they resolve in text and attributes alike. The real DTD is never fetched.
_ENTITY_DTD = "".join(
    f'<!ENTITY {name} "&#{cp};">'
    for name, cp in html.entities.name2codepoint.items()
    if name not in ("amp", "lt", "gt", "quot", "apos")
).encode("ascii")


class IngestError(ValueError):
    pass


class XmlSyntaxError(IngestError):
    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"malformed XML at byte {byte_offset}: {message}")
        self.byte_offset = byte_offset


class JsonlError(IngestError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class RawRecord:
    key: str
    kind: str = "article"
    year: int | None = None
    authors: list[str] = field(default_factory=list)
    venue: str | None = None
    cites: list[str] = field(default_factory=list)
    venue_kind: str | None = None

    def to_json(self) -> dict:
        return {
            "key": self.key,
            "kind": self.kind,
            "year": self.year,
            "authors": list(self.authors),
            "venue": self.venue,
            "venue_kind": self.venue_kind or _DEFAULT_VENUE_KIND.get(self.kind, "unknown"),
            "cites": list(self.cites),
        }


@dataclass
class IngestReport:
    records_read: int = 0
    records_kept: int = 0
    records_skipped: int = 0
    records_skipped_no_year: int = 0
    elements_skipped: int = 0
    dangling_citations_dropped: int = 0
    duplicate_citations_dropped: int = 0
    self_citations_dropped: int = 0
    warnings: list[str] = field(default_factory=list)

    def warn(self, msg: str) -> None:
        log.debug(msg)
        self.warnings.append(msg)

    def counters(self) -> dict:
        d = dict(self.__dict__)
        d.pop("warnings")
        return d

    def to_json(self) -> dict:
        return {**self.counters(), "warnings": list(self.warnings)}


# -- DBLP XML ---------------------------------------------------------------


class _DblpHandler:
    _TEXT_FIELDS = {"author", "year", "journal", "booktitle", "cite"}

    def __init__(self, report: IngestReport):
        self.report = report
        self.done: list[RawRecord] = []
        self.depth = 0
        self.rec: dict | None = None
        self.field: str | None = None
        self.buf: list[str] = []

    def start(self, name, attrs):
        self.depth += 1
        if self.depth == 2:
            if name in RECORD_KINDS:
                self.rec = {"kind": name, "key": attrs.get("key"), "years": [],
                            "authors": [], "venue": None, "cites": []}
            else:
                self.report.elements_skipped += 1
        elif self.rec is not None and self.depth == 3 and name in self._TEXT_FIELDS:
            self.field = name
            self.buf = []

    def text(self, data):
        if self.field is not None:
            self.buf.append(data)

    def entity(self, name, is_parameter):
        if self.field is None or is_parameter:
            return
        cp = html.entities.name2codepoint.get(name)
        if cp is None:
            self.report.warn(f"undefined entity &{name};")
            self.buf.append(f"&{name};")
        else:
            self.buf.append(chr(cp))

    def end(self, name):
        rec = self.rec
        if rec is not None and self.depth == 3 and self.field == name:
            value = "".join(self.buf)
            self.field = None
            if name == "author":
                rec["authors"].append(normalize_name(value))
            elif name == "year":
                rec["years"].append(value.strip())
            elif name in ("journal", "booktitle") and rec["venue"] is None:
                rec["venue"] = normalize_name(value)
            elif name == "cite":
                value = value.strip()
                if value and value != UNKNOWN_CITE:
                    rec["cites"].append(value)
        elif rec is not None and self.depth == 2:
            self._finish(rec)
            self.rec = None
        self.depth -= 1

    def _finish(self, rec):
        key = rec["key"]
        if not key:
            self.report.records_read += 1
            self.report.records_skipped += 1
            self.report.warn(f"{rec['kind']} element without key attribute skipped")
            return
        year = None
        if len(rec["years"]) > 1:
            self.report.warn(f"{key}: multiple year elements, using the first")
        if rec["years"]:
            try:
                year = int(rec["years"][0])
            except ValueError:
                self.report.warn(f"{key}: unparseable year {rec['years'][0]!r}")
        m = _SERIES_KEY.match(key)
        venue = m.group(1) if m else rec["venue"]
        self.done.append(RawRecord(
            key=key, kind=rec["kind"], year=year, authors=rec["authors"],
            venue=venue, cites=rec["cites"],
            venue_kind=_DEFAULT_VENUE_KIND[rec["kind"]],
        ))


def parse_dblp_xml(stream: IO[bytes], report: IngestReport | None = None) -> Iterator[RawRecord]:
    """Stream article/inproceedings records out of a DBLP-style XML file.

    Memory stays bounded by one input chunk. HTML entities such as
    ``&uuml;`` are decoded without reading the DBLP DTD; unknown ones are kept
    verbatim with a warning. Other top-level elements are counted
    in ``report.elements_skipped``.
    """
    report = report if report is not None else IngestReport()
    h = _DblpHandler(report)
    p = xml.parsers.expat.ParserCreate()
    p.SetParamEntityParsing(xml.parsers.expat.XML_PARAM_ENTITY_PARSING_ALWAYS)
    p.UseForeignDTD(True)

    def load_dtd(context, base, system_id, public_id):
        p.ExternalEntityParserCreate(context).Parse(_ENTITY_DTD, True)
        return 1

    p.ExternalEntityRefHandler = load_dtd
    p.buffer_text = True
    p.StartElementHandler = h.start
    p.EndElementHandler = h.end
    p.CharacterDataHandler = h.text
    p.SkippedEntityHandler = h.entity
    while True:
        chunk = stream.read(CHUNK_SIZE)
        try:
            p.Parse(chunk, not chunk)
        except xml.parsers.expat.ExpatError as e:
            raise XmlSyntaxError(xml.parsers.expat.ErrorString(e.code), p.ErrorByteIndex) from None
        yield from h.done
        h.done.clear()
        if not chunk:
            break


# -- JSONL ------------------------------------------------------------------


def _coerce_year(value, lineno: int, report: IngestReport) -> int | None:
    if value is None or isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        try:
            year = int(value.strip())
        except ValueError:
            report.warn(f"line {lineno}: unparseable year {value!r}, treated as absent")
            return None
        report.warn(f"line {lineno}: year given as string {value!r}, coerced")
        return year
    report.warn(f"line {lineno}: unusable year {value!r}, treated as absent")
    return None


def _str_list(value, name: str, lineno: int) -> list[str]:
    if value is None:
        return []
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise JsonlError(f"field {name!r} must be a list of strings", lineno)
    return value


def parse_jsonl(stream: IO[bytes], report: IngestReport | None = None) -> Iterator[RawRecord]:
    """One JSON object per line; unknown fields are ignored."""
    report = report if report is not None else IngestReport()
    for lineno, raw in enumerate(stream, 1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise JsonlError(f"invalid JSON ({e.msg})", lineno) from None
        if not isinstance(obj, dict):
            raise JsonlError("expected a JSON object", lineno)
        key = obj.get("key")
        if not isinstance(key, str) or not key:
            raise JsonlError("missing or empty 'key'", lineno)
        kind = obj.get("kind") or "article"
        if kind not in RECORD_KINDS:
            report.warn(f"line {lineno}: unknown kind {kind!r}")
        venue = obj.get("venue")
        yield RawRecord(
            key=key,
            kind=kind,
            year=_coerce_year(obj.get("year"), lineno, report),
            authors=[normalize_name(a) for a in _str_list(obj.get("authors"), "authors", lineno)],
            venue=venue if isinstance(venue, str) else None,
            cites=[c for c in _str_list(obj.get("cites"), "cites", lineno) if c != UNKNOWN_CITE],
            venue_kind=obj.get("venue_kind"),
        )


def write_jsonl(records: Iterable[RawRecord], stream: IO[bytes]) -> int:
    n = 0
    for r in records:
        stream.write((json.dumps(r.to_json(), ensure_ascii=False) + "\n").encode("utf-8"))
        n += 1
    return n


# -- graph construction -----------------------------------------------------


def is_self_citation(citing: Paper, cited: Paper) -> bool:
    """True iff the two papers share at least one normalized author name."""
    return not set(citing.authors).isdisjoint(cited.authors)


def build_graph(
    records: Iterable[RawRecord],
    drop_self_citations: bool = False,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
    report: IngestReport | None = None,
) -> tuple[CitationGraph, IngestReport]:
    """Resolve citation keys into a :class:`CitationGraph`.

    Dangling targets, repeated (citer, cited) pairs and, optionally,
    self-citations are dropped and counted. Duplicate keys: last record wins.
    """
    report = report if report is not None else IngestReport()
    lo, hi = year_range
    latest: dict[str, RawRecord] = {}
    for r in records:
        report.records_read += 1
        if r.key in latest:
            report.records_skipped += 1
            report.warn(f"duplicate key {r.key!r}, keeping the last record")
        latest[r.key] = r

    shells: dict[str, Paper] = {}
    for key, r in latest.items():
        year = r.year
        if year is not None and not lo <= year <= hi:
            report.warn(f"{key}: year {year} outside [{lo}, {hi}], treated as absent")
            year = None
        if year is None:
            report.records_skipped_no_year += 1
        if not r.authors:
            report.warn(f"{key}: no authors")
        vk = r.venue_kind or _DEFAULT_VENUE_KIND.get(r.kind, "unknown")
        shells[key] = Paper(
            id=key,
            year=year,
            authors=tuple(dict.fromkeys(normalize_name(a) for a in r.authors)),
            venue=r.venue,
            venue_kind=vk if vk in ("conference", "journal") else "unknown",
        )

    papers = []
    for key in sorted(shells):
        src = shells[key]
        resolved: list[str] = []
        seen: set[str] = set()
        for target in latest[key].cites:
            if target not in shells:
                report.dangling_citations_dropped += 1
                continue
            if target in seen:
                report.duplicate_citations_dropped += 1
                continue
            seen.add(target)
            if target == key:
                report.self_citations_dropped += 1
                report.warn(f"{key}: cites itself, dropped")
                continue
            if drop_self_citations and is_self_citation(src, shells[target]):
                report.self_citations_dropped += 1
                continue
            resolved.append(target)
        papers.append(Paper(src.id, src.year, src.authors, src.venue, src.venue_kind,
                            tuple(resolved)))
    report.records_kept = len(papers)
    graph = CitationGraph.from_papers(
        papers, dangling_citation_count=report.dangling_citations_dropped,
        year_range=year_range,
    )
    return graph, report


def load_records(path: str, fmt: str | None = None, report: IngestReport | None = None):
    """Read every record from ``path``; format guessed from the suffix if not given."""
    fmt = fmt or guess_format(path)
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rb") as f:
        if fmt == "dblp-xml":
            return list(parse_dblp_xml(f, report))
        if fmt == "jsonl":
            return list(parse_jsonl(f, report))
    raise IngestError(f"unknown input format {fmt!r}")


def guess_format(path: str) -> str:
    return "dblp-xml" if path.lower().removesuffix(".gz").endswith(".xml") else "jsonl"


def load_graph(
    path: str,
    fmt: str | None = None,
    drop_self_citations: bool = False,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> tuple[CitationGraph, IngestReport]:
    report = IngestReport()
    records = load_records(path, fmt, report)
    return build_graph(records, drop_self_citations, year_range, report)
