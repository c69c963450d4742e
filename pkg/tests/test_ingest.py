import io
import json
import random

import pytest

from citeindex.graph import EntityKey, IndexParams, Paper
from citeindex.indices import all_profiles
from citeindex.ingest import (
    IngestReport,
    JsonlError,
    RawRecord,
    XmlSyntaxError,
    build_graph,
    is_self_citation,
    load_graph,
    parse_dblp_xml,
    parse_jsonl,
    write_jsonl,
)


@pytest.fixture
def sample(data_dir):
    report = IngestReport()
    with open(data_dir / "sample_dblp.xml", "rb") as f:
        records = list(parse_dblp_xml(f, report))
    return records, report


class TestDblpXml:
    def test_inproceedings_mapping(self, sample):
        records, _ = sample
        r = records[0]
        assert r.key == "conf/vldb/StonebrakerR95"
        assert r.kind == "inproceedings"
        assert r.year == 1995
        assert r.authors == ["Michael Stonebraker", "Lawrence A. Rowe"]
        assert r.venue == "vldb"
        assert r.venue_kind == "conference"

    def test_placeholder_cite_dropped(self, sample):
        records, _ = sample
        assert records[0].cites == [
            "journals/tods/Gray81", "conf/sigmod/Müller90", "conf/unknown/Nowhere77"]

    def test_entities_decoded_in_text_and_attributes(self, sample):
        records, _ = sample
        m = records[2]
        assert m.key == "conf/sigmod/Müller90"
        assert m.authors == ["Hans Müller", "Jim Gray"]

    def test_other_elements_skipped_and_counted(self, sample):
        records, report = sample
        assert [r.key for r in records] == [
            "conf/vldb/StonebrakerR95", "journals/tods/Gray81",
            "conf/sigmod/Müller90", "misc/undated"]
        assert report.elements_skipped == 2

    def test_missing_key_and_multiple_years_warn(self, sample):
        records, report = sample
        assert report.records_skipped == 1
        assert any("without key" in w for w in report.warnings)
        assert records[1].year == 1981
        assert any("multiple year" in w for w in report.warnings)

    def test_venue_falls_back_to_journal_text(self, sample):
        records, _ = sample
        assert records[3].venue == "Some Journal"
        assert records[3].year is None

    def test_latin1(self, data_dir):
        with open(data_dir / "latin1_dblp.xml", "rb") as f:
            (r,) = parse_dblp_xml(f)
        assert r.authors == ["Jürgen Müller"]
        assert r.key == "journals/is/Müller88"

    def test_unknown_entity_kept_with_warning(self):
        report = IngestReport()
        doc = b'<dblp><article key="k"><author>A &frobnicate; B</author></article></dblp>'
        (r,) = parse_dblp_xml(io.BytesIO(doc), report)
        assert r.authors == ["A &frobnicate; B"]
        assert any("frobnicate" in w for w in report.warnings)

    def test_malformed_reports_byte_offset(self):
        doc = b"<dblp><article key='a'><year>1990</year></articl></dblp>"
        with pytest.raises(XmlSyntaxError) as exc:
            list(parse_dblp_xml(io.BytesIO(doc)))
        assert exc.value.byte_offset == doc.index(b"</articl>") + 2

    def test_streams_before_end_of_input(self):
        body = b"".join(
            b'<article key="k%d"><author>A</author><year>1990</year></article>\n' % i
            for i in range(20000))
        doc = b"<dblp>" + body + b"</dblp>"

        class Counting(io.BytesIO):
            reads = 0

            def read(self, n=-1):
                Counting.reads += 1
                return super().read(n)

        stream = Counting(doc)
        it = parse_dblp_xml(stream)
        next(it)
        assert stream.tell() < len(doc)
        assert sum(1 for _ in it) == 19999


class TestJsonl:
    def test_example(self):
        line = b'{"key":"x","kind":"article","year":2000,"authors":["A"],"venue":"tods","cites":[]}\n'
        (r,) = parse_jsonl(io.BytesIO(line))
        assert r == RawRecord("x", "article", 2000, ["A"], "tods", [], None)

    def test_empty(self):
        assert list(parse_jsonl(io.BytesIO(b""))) == []

    def test_string_year_coerced_with_warning(self):
        report = IngestReport()
        (r,) = parse_jsonl(io.BytesIO(b'{"key":"x","year":"2000"}\n'), report)
        assert r.year == 2000
        assert report.warnings and "coerced" in report.warnings[0]

    def test_bad_year_string_is_absent(self):
        report = IngestReport()
        (r,) = parse_jsonl(io.BytesIO(b'{"key":"x","year":"MMXX"}\n'), report)
        assert r.year is None and report.warnings

    def test_unknown_fields_ignored_and_optionals_absent(self):
        (r,) = parse_jsonl(io.BytesIO(b'{"key":"x","colour":"red"}\n'))
        assert (r.year, r.venue, r.authors, r.cites) == (None, None, [], [])

    def test_malformed_line_number(self):
        data = b'{"key":"a"}\n\n{"key": oops}\n'
        with pytest.raises(JsonlError) as exc:
            list(parse_jsonl(io.BytesIO(data)))
        assert exc.value.line == 3

    def test_missing_key(self):
        with pytest.raises(JsonlError):
            list(parse_jsonl(io.BytesIO(b'{"year": 1990}\n')))

    def test_write_read_roundtrip(self):
        recs = [RawRecord("a", "inproceedings", 1990, ["Ä B"], "v", ["b"], "conference"),
                RawRecord("b", "article", None, [], None, [], "journal")]
        buf = io.BytesIO()
        write_jsonl(recs, buf)
        lines = buf.getvalue().decode().splitlines()
        assert set(json.loads(lines[0])) == {"key", "kind", "year", "authors", "venue", "venue_kind", "cites"}
        assert list(parse_jsonl(io.BytesIO(buf.getvalue()))) == recs


class TestBuildGraph:
    def test_resolved_edge(self):
        g, rep = build_graph([RawRecord("A", cites=["B"]), RawRecord("B")])
        assert g.in_edges["B"] == ("A",)
        assert rep.dangling_citations_dropped == 0

    def test_dangling(self):
        g, rep = build_graph([RawRecord("A", cites=["X"])])
        assert g.in_edges["A"] == ()
        assert rep.dangling_citations_dropped == 1 == g.dangling_citation_count

    def test_self_citation_dropped(self):
        recs = [RawRecord("A", authors=["P"], cites=["B"]), RawRecord("B", authors=["P", "Q"])]
        g, rep = build_graph(recs, drop_self_citations=True)
        assert g.in_edges["B"] == ()
        assert rep.self_citations_dropped == 1
        g, rep = build_graph(recs)
        assert g.in_edges["B"] == ("A",)
        assert rep.self_citations_dropped == 0

    def test_duplicates(self):
        recs = [RawRecord("A", cites=["B", "B"]), RawRecord("B"), RawRecord("B", year=1990)]
        g, rep = build_graph(recs)
        assert g.papers["A"].cites == ("B",)
        assert rep.duplicate_citations_dropped == 1
        assert g.papers["B"].year == 1990
        assert rep.records_read == 3 and rep.records_kept == 2 and rep.records_skipped == 1

    def test_year_range(self):
        g, rep = build_graph([RawRecord("A", year=1066)])
        assert g.papers["A"].year is None
        assert rep.records_skipped_no_year == 1

    def test_sample_report_is_exact(self, data_dir):
        g, rep = load_graph(str(data_dir / "sample_dblp.xml"), drop_self_citations=True)
        assert rep.counters() == {
            "records_read": 5, "records_kept": 4, "records_skipped": 1,
            "records_skipped_no_year": 1, "elements_skipped": 2,
            "dangling_citations_dropped": 1, "duplicate_citations_dropped": 1,
            "self_citations_dropped": 2,
        }
        assert rep.records_read == rep.records_kept + rep.records_skipped
        assert g.in_edges["journals/tods/Gray81"] == ("conf/vldb/StonebrakerR95",)
        assert g.edge_count() == 2

    def test_order_insensitive(self, synthetic_graphs):
        from conftest import small_config
        from citeindex.synthgen import generate_corpus

        records = list(generate_corpus(small_config(3)).records)
        g1, r1 = build_graph(records)
        shuffled = records[:]
        random.Random(5).shuffle(shuffled)
        g2, r2 = build_graph(shuffled)
        assert g1 == g2
        assert r1.counters() == r2.counters()
        params = IndexParams(now=g1.max_year)
        assert all_profiles(g1, "author", params) == all_profiles(g2, "author", params)


class TestSelfCitation:
    def test_rule(self):
        assert is_self_citation(Paper("a", authors=("P",)), Paper("b", authors=("P", "Q")))
        assert not is_self_citation(Paper("a", authors=("P",)), Paper("b", authors=("Q",)))
        assert not is_self_citation(Paper("a"), Paper("b"))


def test_author_index_uses_normalized_names(data_dir):
    g, _ = load_graph(str(data_dir / "sample_dblp.xml"))
    assert g.papers_of(EntityKey.author("Jim  Gray")) == {
        "journals/tods/Gray81", "conf/sigmod/Müller90", "misc/undated"}
