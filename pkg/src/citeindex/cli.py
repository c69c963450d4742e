"""Command-line entry point: rank, history, yearly, generate, validate."""
from __future__ import annotations

import argparse
import difflib
import json
import logging
import os
import sys

from .graph import AUTHOR, ENTITY_KINDS, VENUE, VENUE_YEAR, EntityKey, IndexParams
from .indices import INDEX_KINDS, all_profiles
from .ingest import (
    IngestError,
    IngestReport,
    build_graph,
    load_graph,
    load_records,
    write_jsonl,
)
from .ranking import emit_curve, emit_table, emit_tables, rank_entities
from .synthgen import GenConfig, GenConfigError, generate_corpus
from .temporal import history_curves, slice_as_of, yearly_profiles

log = logging.getLogger("citeindex")


class CliError(Exception):
    pass


def _report(report: IngestReport) -> None:
    for w in report.warnings:
        log.warning(w)
    sys.stderr.write(json.dumps(report.counters()) + "\n")


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="DBLP XML or JSONL file (.gz accepted)")
    p.add_argument("--input-format", choices=["dblp-xml", "jsonl"],
                   help="default: guessed from the file suffix")
    p.add_argument("--drop-self-citations", action="store_true")
    p.add_argument("--now", type=int, dest="now_year",
                   help="evaluation year (default: latest year in the data)")
    p.add_argument("--gamma", type=float, default=4.0)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=1)


def _add_output(p: argparse.ArgumentParser, formats=("csv", "tsv", "json"), default="tsv") -> None:
    p.add_argument("-f", "--output-format", choices=formats, default=default)


def _load(args):
    try:
        graph, report = load_graph(args.input, args.input_format, args.drop_self_citations)
    except (OSError, IngestError) as e:
        raise CliError(str(e)) from e
    _report(report)
    return graph


def _evaluation(graph, args):
    """Graph (or as-of view) plus params for the requested evaluation year."""
    now = args.now_year if args.now_year is not None else graph.max_year
    if now is None:
        raise CliError("data has no dated papers; pass --now")
    try:
        params = IndexParams(now=now, gamma=args.gamma, delta=args.delta)
    except ValueError as e:
        raise CliError(str(e)) from e
    if graph.max_year is not None and now < graph.max_year:
        return slice_as_of(graph, now), params
    return graph, params


def cmd_rank(args) -> bytes:
    graph = _load(args)
    view, params = _evaluation(graph, args)
    profiles = all_profiles(view, args.entity, params, workers=args.workers)
    table = rank_entities(profiles, args.index)
    return emit_table(table, args.output_format, args.top)


def _resolve_entity(graph, kind: str, name: str, year: int | None) -> EntityKey:
    entity = EntityKey.author(name) if kind == AUTHOR else (
        EntityKey.venue(name) if kind == VENUE else EntityKey.venue_year(name, year))
    if graph.papers_of(entity):
        return entity
    pool = graph.by_author if kind == AUTHOR else graph.by_venue
    near = difflib.get_close_matches(entity.name, list(pool), n=5)
    hint = f"; did you mean: {', '.join(near)}" if near else ""
    raise CliError(f"unknown {kind} {entity.name!r}{hint}")


def cmd_history(args) -> bytes:
    graph = _load(args)
    if args.entity == VENUE_YEAR and args.year is None:
        raise CliError("--year is required for venue_year entities")
    entity = _resolve_entity(graph, args.entity, args.name,
                             args.year if args.entity == VENUE_YEAR else None)
    _, params = _evaluation(graph, args)
    kinds = [k for spec in args.index for k in spec.split(",") if k]
    for k in kinds:
        if k not in INDEX_KINDS:
            raise CliError(f"unknown index kind {k!r}")
    first = min((p.year for p in graph.iter_papers() if p.year is not None), default=params.now)
    year_from = args.year_from if args.year_from is not None else first
    year_to = args.year_to if args.year_to is not None else params.now
    if year_from > year_to:
        raise CliError(f"--from {year_from} is after --to {year_to}")
    series = history_curves(graph, entity, kinds, year_from, year_to, params)
    return emit_curve(series, args.output_format)


def cmd_yearly(args) -> bytes:
    graph = _load(args)
    if args.as_of is not None:
        args.now_year = args.as_of
    view, params = _evaluation(graph, args)
    if args.venue is not None and not graph.by_venue.get(args.venue):
        _resolve_entity(graph, VENUE, args.venue, None)
    lo = args.year_from if args.year_from is not None else params.now
    hi = args.year_to if args.year_to is not None else lo
    if lo > hi:
        raise CliError(f"--from {lo} is after --to {hi}")
    profiles = yearly_profiles(view, range(lo, hi + 1), params, args.venue, args.workers)
    # ranks restart per publication year: rows are only comparable within a year
    tables = []
    for y in range(lo, hi + 1):
        rows = [p for p in profiles if p.entity.year == y]
        if rows:
            tables.append(rank_entities(rows, args.sort))
    return emit_tables(tables, args.output_format, args.top)


def cmd_generate(args) -> bytes:
    config = GenConfig(
        seed=args.seed,
        n_papers=args.papers,
        year_span=(args.years[0], args.years[1]),
        n_authors=args.authors,
        n_venues=args.venues,
        authors_per_paper=(args.authors_per_paper[0], args.authors_per_paper[1]),
        attachment_exponent=args.attachment_exponent,
        cites_per_paper=(args.cites_per_paper[0], args.cites_per_paper[1]),
        trendsetter_fraction=args.trendsetter_fraction,
    )
    try:
        corpus = generate_corpus(config)
    except GenConfigError as e:
        raise CliError(str(e)) from e
    tmp = args.output + ".partial"
    with open(tmp, "wb") as f:
        write_jsonl(corpus.records, f)
    os.replace(tmp, args.output)
    log.info("wrote %d records to %s", len(corpus.records), args.output)
    return b""


def cmd_validate(args) -> bytes:
    report = IngestReport()
    try:
        records = load_records(args.input, args.input_format, report)
        graph, report = build_graph(records, args.drop_self_citations, report=report)
    except (OSError, IngestError) as e:
        raise CliError(str(e)) from e
    summary = {
        "papers": len(graph.papers),
        "edges": graph.edge_count(),
        "authors": len(graph.by_author),
        "venues": len(graph.by_venue),
        "max_year": graph.max_year,
        "report": report.to_json(),
    }
    return (json.dumps(summary, ensure_ascii=False, indent=1) + "\n").encode("utf-8")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="citeindex", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank entities by one index")
    _add_input(p)
    _add_output(p)
    p.add_argument("--entity", choices=ENTITY_KINDS, default=AUTHOR)
    p.add_argument("--index", choices=INDEX_KINDS, default="h")
    p.add_argument("--top", type=int)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("history", help="per-year index curves for one entity")
    _add_input(p)
    _add_output(p, formats=("tsv", "json"))
    p.add_argument("name", help="author or venue name")
    p.add_argument("--entity", choices=ENTITY_KINDS, default=AUTHOR)
    p.add_argument("--year", type=int, help="publication year for venue_year entities")
    p.add_argument("--index", action="append", default=None,
                   help="index kind(s), repeatable or comma separated (default h)")
    p.add_argument("--from", type=int, dest="year_from")
    p.add_argument("--to", type=int, dest="year_to")
    p.set_defaults(func=cmd_history)

    p = sub.add_parser("yearly", help="yearly venue indices")
    _add_input(p)
    _add_output(p)
    p.add_argument("--venue", help="restrict to one venue (default: all)")
    p.add_argument("--from", type=int, dest="year_from")
    p.add_argument("--to", type=int, dest="year_to")
    p.add_argument("--sort", choices=["h", "h_n"], default="h")
    p.add_argument("--as-of", type=int, help="count only citations dated up to this year")
    p.add_argument("--top", type=int)
    p.set_defaults(func=cmd_yearly)

    p = sub.add_parser("generate", help="write a synthetic JSONL corpus")
    p.add_argument("output")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--papers", type=int, default=1000)
    p.add_argument("--years", type=int, nargs=2, default=(1980, 2000), metavar=("START", "END"))
    p.add_argument("--authors", type=int, default=200)
    p.add_argument("--venues", type=int, default=10)
    p.add_argument("--authors-per-paper", type=int, nargs=2, default=(1, 3), metavar=("MIN", "MAX"))
    p.add_argument("--cites-per-paper", type=int, nargs=2, default=(0, 5), metavar=("MIN", "MAX"))
    p.add_argument("--attachment-exponent", type=float, default=1.0)
    p.add_argument("--trendsetter-fraction", type=float, default=0.0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="parse and report, no index computation")
    p.add_argument("input")
    p.add_argument("--input-format", choices=["dblp-xml", "jsonl"])
    p.add_argument("--drop-self-citations", action="store_true")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if getattr(args, "index", "") is None:
        args.index = ["h"]
    try:
        data = args.func(args)
    except CliError as e:
        sys.stderr.write(f"citeindex: error: {e}\n")
        return 1
    sys.stdout.buffer.write(data)
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
