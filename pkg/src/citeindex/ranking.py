"""Deterministic ranking of index profiles and table/curve emission."""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from typing import Sequence

from .graph import VENUE_YEAR
from .indices import INDEX_KINDS, IndexProfile

log = logging.getLogger(__name__)

# secondary key for each primary index
_TIE_BREAK = {
    "h": "a",
    "h_c": "a_c",
    "h_t": "a_t",
    "h_n": "h",
    "a": "h",
    "a_c": "h_c",
    "a_t": "h_t",
}

_CENT = Decimal("0.01")


class RankingError(ValueError):
    pass


@dataclass(frozen=True)
class RankRow:
    rank: int
    profile: IndexProfile


@dataclass(frozen=True)
class RankTable:
    index_kind: str
    rows: tuple[RankRow, ...]
    eval_year: int | None


def _desc(value) -> tuple:
    # absent values sort below any present value
    return (1, 0) if value is None else (0, -value)


def _sort_key(profile: IndexProfile, kind: str) -> tuple:
    return (
        _desc(profile.value(kind)),
        _desc(profile.value(_TIE_BREAK[kind])),
        profile.entity.sort_key(),
    )


def rank_entities(profiles: Sequence[IndexProfile], index_kind: str) -> RankTable:
    """Sort by index (desc), matching tie-break value (desc), then name (asc)."""
    if index_kind not in INDEX_KINDS:
        raise RankingError(f"unknown index kind {index_kind!r}")
    years = {p.eval_year for p in profiles}
    if len(years) > 1:
        raise RankingError(f"profiles mix evaluation years {sorted(years)}")
    ordered = sorted(profiles, key=lambda p: _sort_key(p, index_kind))
    rows = tuple(RankRow(i, p) for i, p in enumerate(ordered, 1))
    return RankTable(index_kind, rows, years.pop() if years else None)


def format_value(value) -> str:
    """Display form: truncate toward zero at two decimals.

    Values with an exact representation at two decimals or fewer are printed
    without trailing zeros ("1", "0.8", "3.72"); others keep both digits
    ("0.10" for 9/85).
    """
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    exact = Decimal(repr(float(value)))
    cut = exact.quantize(_CENT, rounding=ROUND_DOWN)
    if cut == exact:
        s = format(cut.normalize(), "f")
        return "0" if s in ("-0", "") else s
    return format(cut, "f")


# (column, field) layouts, one per table shape
_LAYOUTS = {
    "h": ["h", "a", "n_c_tot", "n_p"],
    "h_c": ["h_c", "a_c", "h", "n_c_tot", "n_p"],
    "h_t": ["h_t", "a_t", "h", "n_c_tot", "n_p"],
    "h_n": ["h_n", "h", "a", "n_c_tot", "n_p"],
    "a": ["a", "h", "n_c_tot", "n_p"],
    "a_c": ["a_c", "h_c", "h", "n_c_tot", "n_p"],
    "a_t": ["a_t", "h_t", "h", "n_c_tot", "n_p"],
}
_YEARLY_LAYOUTS = {
    "h": ["h", "a", "h_n", "n_c_tot", "n_p"],
    "h_n": ["h_n", "h", "n_p"],
}
_REAL_FIELDS = {"a", "a_c", "a_t", "h_n"}


def table_columns(table: RankTable) -> list[str]:
    yearly = bool(table.rows) and table.rows[0].profile.entity.kind == VENUE_YEAR
    if yearly:
        fields = _YEARLY_LAYOUTS.get(table.index_kind, _LAYOUTS[table.index_kind])
        return ["rank", "name", "year", *fields]
    return ["rank", "name", *_LAYOUTS[table.index_kind]]


def _cell(row: RankRow, col: str):
    if col == "rank":
        return row.rank
    if col == "name":
        return row.profile.entity.name
    if col == "year":
        return row.profile.entity.year
    return getattr(row.profile, col)


def _clean_tsv(text: str) -> str:
    if "\t" in text or "\n" in text:
        log.warning("replacing tab/newline in %r for TSV output", text)
        return text.replace("\t", " ").replace("\n", " ")
    return text


def emit_table(table: RankTable, format: str = "csv", top_k: int | None = None) -> bytes:
    return emit_tables([table], format, top_k)


def emit_tables(tables: Sequence[RankTable], format: str = "csv", top_k: int | None = None) -> bytes:
    """Concatenate same-shaped tables under one header (e.g. one per year)."""
    tables = [t for t in tables if t.rows] or list(tables[:1])
    cols = table_columns(tables[0]) if tables else ["rank", "name"]
    rows = [r for t in tables for r in (t.rows if top_k is None else t.rows[:top_k])]
    if format == "json":
        out = []
        for r in rows:
            obj = {c: _cell(r, c) for c in cols}
            obj["display"] = {c: format_value(obj[c]) for c in cols if c in _REAL_FIELDS}
            out.append(obj)
        return (json.dumps(out, ensure_ascii=False, indent=1) + "\n").encode("utf-8")
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_cell(r, c) if c == "name" else format_value(_cell(r, c)) for c in cols])
        return buf.getvalue().encode("utf-8")
    if format == "tsv":
        lines = ["\t".join(cols)]
        for r in rows:
            lines.append("\t".join(
                _clean_tsv(_cell(r, c)) if c == "name" else format_value(_cell(r, c))
                for c in cols
            ))
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unsupported table format {format!r}")


def _series_label(s) -> str:
    return f"{s.entity.label()}:{s.index_kind}"


def _full(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def emit_curve(series: Sequence, format: str = "tsv") -> bytes:
    """Curve data for external plotting; values at full precision."""
    if format == "json":
        out = [
            {
                "entity": {"kind": s.entity.kind, "name": s.entity.name, "year": s.entity.year},
                "index_kind": s.index_kind,
                "points": [[y, v] for y, v in s.points],
            }
            for s in series
        ]
        return (json.dumps(out, ensure_ascii=False) + "\n").encode("utf-8")
    if format != "tsv":
        raise ValueError(f"unsupported curve format {format!r}")
    years = sorted({y for s in series for y, _ in s.points})
    lookup = [dict(s.points) for s in series]
    lines = ["\t".join(["year", *(_clean_tsv(_series_label(s)) for s in series)])]
    for y in years:
        lines.append("\t".join([str(y), *(_full(d.get(y)) for d in lookup)]))
    return ("\n".join(lines) + "\n").encode("utf-8")
